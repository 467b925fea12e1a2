//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use sobolev_stab::cli::{execute, run_command, Check, Command, RunConfig};

const CASES: [(usize, f64); 5] = [(3, 2.0), (4, 2.0), (4, 2.5), (5, 3.0), (5, 2.0)];
const SUITE_BUDGET_SECS: f64 = 300.0;

const TITLES: [&str; 14] = [
    "sharp-constant consistency",
    "Euler-Lagrange residual",
    "spectrum identities",
    "spectral gap",
    "oscillation counts",
    "decay exponents",
    "inequality scans",
    "second variation",
    "expansion order",
    "distance recovery",
    "stability bounds",
    "Poincare bound",
    "polar formula",
    "determinism",
];

struct Verdict {
    pass: bool,
    lines: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Verdict { pass: true, lines: Vec::new() }
    }

    fn add(&mut self, pass: bool, line: String) {
        self.pass &= pass;
        self.lines.push(line);
    }
}

fn config(n: usize, p: f64, out: PathBuf) -> RunConfig {
    RunConfig { n, p, quad_count: 256, out, ..RunConfig::default() }
}

fn files_in(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).expect("report directory") {
        let path = entry.expect("entry").path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        out.insert(name, fs::read(&path).expect("report file"));
    }
    out
}

fn record(verdicts: &mut BTreeMap<u32, Verdict>, tag: &str, checks: &[Check]) {
    for c in checks {
        // errors carry criterion 0 and fail every criterion of their command
        let keys: Vec<u32> = if c.criterion == 0 { (1..=13).collect() } else { vec![c.criterion] };
        for k in keys {
            verdicts.entry(k).or_insert_with(Verdict::new).add(c.pass, format!("{tag} {}: {}", c.name, c.detail));
        }
    }
}

fn main() {
    let suite = Instant::now();
    let root = std::env::temp_dir().join(format!("sobolev-stab-acceptance-{}", std::process::id()));
    let mut verdicts: BTreeMap<u32, Verdict> = BTreeMap::new();
    let mut first_run: Option<(PathBuf, RunConfig)> = None;

    for (n, p) in CASES {
        let tag = format!("(n={n}, p={p})");
        let dir = root.join(format!("n{n}_p{p}"));
        let cfg = config(n, p, dir.clone());

        let t = Instant::now();
        let quick = run_command(Command::Constants, &cfg).expect("valid config");
        let secs = t.elapsed().as_secs_f64();
        verdicts.entry(1).or_insert_with(Verdict::new).add(secs < 1.0, format!("{tag} runtime {secs:.3} s"));
        drop(quick);

        let t = Instant::now();
        let quick = run_command(Command::Spectrum, &cfg).expect("valid config");
        let secs = t.elapsed().as_secs_f64();
        verdicts.entry(3).or_insert_with(Verdict::new).add(secs < 10.0, format!("{tag} runtime {secs:.3} s"));
        drop(quick);

        let (reports, _) = execute(Command::All, &cfg).expect("valid config");
        for r in &reports {
            let checks: Vec<Check> = if r.command == "polar" && n != 3 {
                // criterion 13 is a three-dimensional check
                Vec::new()
            } else {
                r.checks.clone()
            };
            record(&mut verdicts, &tag, &checks);
        }
        if first_run.is_none() {
            first_run = Some((dir, cfg));
        }
    }

    let (dir, cfg) = first_run.expect("at least one case");
    let again_dir = root.join("repeat");
    let again = RunConfig { out: again_dir.clone(), ..cfg.clone() };
    execute(Command::All, &again).expect("valid config");
    let (a, b) = (files_in(&dir), files_in(&again_dir));
    let differing: Vec<&String> = a.keys().filter(|k| a.get(*k) != b.get(*k)).collect();
    let same = a.len() == b.len() && differing.is_empty();
    let v = verdicts.entry(14).or_insert_with(Verdict::new);
    v.add(same, format!("(n={}, p={}) {} report files, {} differ", cfg.n, cfg.p, a.len(), differing.len()));
    let total = suite.elapsed().as_secs_f64();
    v.add(total < SUITE_BUDGET_SECS, format!("suite wall-clock {total:.1} s"));

    let mut all = true;
    for k in 1..=14u32 {
        let v = verdicts.remove(&k).unwrap_or_else(|| Verdict { pass: false, lines: vec!["no checks ran".into()] });
        all &= v.pass;
        println!("{} {:>2} {}", if v.pass { "PASS" } else { "FAIL" }, k, TITLES[k as usize - 1]);
        for line in &v.lines {
            println!("        {line}");
        }
    }
    let _ = fs::remove_dir_all(&root);
    if !all {
        std::process::exit(1);
    }
}
