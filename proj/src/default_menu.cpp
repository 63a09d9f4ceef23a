#include "rlfi/command_plan.hpp"

namespace rlfi {

namespace {

// Slot k of state s is the command behind graph action k in s.
CommandMenu build_default_menu() {
  CommandMenu m;

  m[0] = {
      "git clone https://github.com/Velocidex/WinPmem.git {outdir}/WinPmem",
      "python3 -m pip install volatility3",
      "vol --help",
      "git -C {outdir}/WinPmem status",
      "mkdir -p {outdir}",
      "python3 --version",
      "systeminfo",
      "whoami /priv",
  };

  m[2] = {
      "dir {outdir}/WinPmem",
      "{outdir}/WinPmem/winpmem_mini_x64_rc2.exe --install",
      "sc query pmem",
      "bcdedit /enum",
      "bcdedit /set testsigning on",
      "fltmc",
      "git -C {outdir}/WinPmem pull",
  };

  m[5] = {
      "fsutil volume diskfree C:",
      "{outdir}/WinPmem/winpmem_mini_x64_rc2.exe --uninstall",
      "{outdir}/WinPmem/winpmem_mini_x64_rc2.exe {image}",
      "dir {outdir}",
      "sc query pmem",
      "fsutil volume diskfree {outdir}",
      "certutil -hashfile {image} SHA256",
      "{outdir}/WinPmem/winpmem_mini_x64_rc2.exe --split 1G {image}",
  };

  m[10] = {
      "vol -f {image} windows.info",
      "systeminfo",
      "vol -f {image} windows.registry.hivelist",
      "wmic os get Caption,Version,BuildNumber",
      "vol -f {image} --symbol-dirs {outdir}/symbols windows.info",
      "reg query \"HKLM\\SOFTWARE\\Microsoft\\Windows NT\\CurrentVersion\"",
      "vol -f {image} banners.Banners",
      "echo {profile} > {outdir}/profile.txt",
      "{outdir}/WinPmem/winpmem_mini_x64_rc2.exe {image}",
  };

  m[15] = {
      "vol -f {image} windows.pslist",
      "vol -f {image} windows.pstree",
      "vol -f {image} windows.cmdline",
      "vol -f {image} windows.psscan",
      "vol -f {image} windows.sessions",
      "vol -f {image} windows.pslist --physical",
      "vol -f {image} windows.envars",
      "vol -f {image} windows.privileges",
      "vol -f {image} windows.getsids",
      "vol -f {image} windows.info",
  };

  m[20] = {
      "vol -f {image} windows.pslist > {outdir}/pslist.txt",
      "awk 'NR>4 {print $1\",\"$2\",\"$3}' {outdir}/pslist.txt > {outdir}/features.csv",
      "vol -f {image} windows.pstree > {outdir}/pstree.txt",
      "vol -f {image} windows.cmdline > {outdir}/cmdline.txt",
      "sort -k2 -n {outdir}/pslist.txt",
      "wc -l {outdir}/pslist.txt",
      "awk -F'\\t' '{print $2}' {outdir}/pslist.txt",
      "grep -i -E \"powershell|cmd|rundll32\" {outdir}/pslist.txt",
      "vol -f {image} windows.pslist",
  };

  m[30] = {
      "cat {outdir}/features.csv",
      "vol -f {image} windows.malfind --pid {pid}",
      "vol -f {image} windows.dlllist --pid {pid}",
      "vol -f {image} windows.ldrmodules --pid {pid}",
      "vol -f {image} windows.vadinfo --pid {pid}",
      "vol -f {image} -o {outdir} windows.dlllist --pid {pid} --dump",
      "vol -f {image} windows.ldrmodules",
      "awk 'NR>4 {print $1\",\"$2\",\"$3}' {outdir}/pslist.txt > {outdir}/features.csv",
  };

  m[35] = {
      "vol -f {image} windows.dlllist --pid {pid} > {outdir}/dlllist.txt",
      "vol -f {image} windows.handles",
      "grep -i \".dll\" {outdir}/dlllist.txt",
      "vol -f {image} windows.handles --pid {pid}",
      "vol -f {image} windows.verinfo --pid {pid}",
      "vol -f {image} windows.mutantscan",
      "vol -f {image} windows.dlllist --pid {pid}",
  };

  m[40] = {
      "vol -f {image} windows.netstat",
      "vol -f {image} windows.handles --pid {pid} > {outdir}/handles.txt",
      "vol -f {image} windows.netscan --include-corrupt",
      "grep -i File {outdir}/handles.txt",
      "vol -f {image} windows.netscan",
      "netstat -ano",
      "vol -f {image} windows.filescan",
      "vol -f {image} windows.handles --pid {pid}",
  };

  m[45] = {
      "vol -f {image} windows.netstat > {outdir}/netstat.txt",
      "vol -f {image} windows.registry.hivelist",
      "grep ESTABLISHED {outdir}/netstat.txt",
      "vol -f {image} -o {outdir} windows.registry.hivelist --dump",
      "vol -f {image} windows.registry.certificates",
      "vol -f {image} windows.registry.hivescan",
      "vol -f {image} windows.netstat",
  };

  m[50] = {
      "vol -f {image} windows.registry.userassist",
      "vol -f {image} windows.registry.hivelist > {outdir}/hivelist.txt",
      "vol -f {image} windows.registry.printkey --key \"Software\\Microsoft\\Windows\\CurrentVersion\\Run\"",
      "vol -f {image} windows.registry.printkey",
      "vol -f {image} windows.registry.printkey --key \"Software\\Microsoft\\Windows\\CurrentVersion\\RunOnce\"",
      "vol -f {image} windows.svcscan",
      "vol -f {image} windows.scheduled_tasks",
      "vol -f {image} windows.registry.hivelist",
  };

  m[55] = {
      "vol -f {image} -o {outdir} windows.pslist --pid {pid} --dump",
      "vol -f {image} windows.registry.printkey --key \"Software\\Microsoft\\Windows\\CurrentVersion\\Run\" > {outdir}/runkeys.txt",
      "mkdir -p {outdir}/dump",
      "vol -f {image} -o {outdir}/dump windows.dumpfiles --pid {pid}",
      "vol -f {image} windows.vadinfo --pid {pid}",
      "vol -f {image} -o {outdir} windows.memmap --pid {pid} --dump",
      "ls -l {outdir}",
      "vol -f {image} windows.registry.printkey",
  };

  m[60] = {
      "sha256sum {outdir}/pid.{pid}.*.dmp > {outdir}/sha256.txt",
      "sha256sum {outdir}/pid.{pid}.*.dmp | hashlookup",
      "sha256sum {outdir}/*.dmp | hashlookup",
      "ls -l {outdir}/*.dmp",
      "strings -n 8 {outdir}/pid.{pid}.*.dmp | grep -i -E \"http|onion|bitcoin\"",
      "file {outdir}/pid.{pid}.*.dmp",
      "vol -f {image} -o {outdir} windows.pslist --pid {pid} --dump",
  };

  m[66] = {
      "ls -l {outdir}",
      "tar -czf {outdir}.tar.gz {outdir}",
      "sha256sum {image} > {outdir}/image.sha256",
      "vol -f {image} windows.info > {outdir}/summary.txt",
      "echo investigation complete for pid {pid} on {profile}",
  };

  return m;
}

}  // namespace

const CommandMenu& default_menu() {
  static const CommandMenu menu = build_default_menu();
  return menu;
}

}  // namespace rlfi
