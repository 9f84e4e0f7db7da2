use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const TWO_MACHINE: &str = "c two machines, four jobs\np semimatch 4 2 5\ne 1 1 1\ne 2 1 1\ne 2 2 1\ne 3 2 1\ne 4 2 1\n";

fn semimatch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semimatch")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_every_mode_on_two_machine() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "two_machine.txt", TWO_MACHINE);
    let weighted = semimatch(&["solve", s(&f)]);
    assert_eq!(weighted.status.code(), Some(0));
    assert_eq!(stdout(&weighted), "a 1 1\na 2 1\na 3 2\na 4 2\ncost 6\n");
    for args in [vec!["--unweighted"], vec!["--weighted", "--solver", "baseline"], vec!["--unweighted", "--solver", "baseline"]] {
        let mut full = vec!["solve"];
        full.extend(args);
        full.push(s(&f));
        assert!(stdout(&semimatch(&full)).ends_with("cost 6\n"), "{full:?}");
    }
    assert!(stdout(&semimatch(&["solve", "--convex", s(&f)])).ends_with("cost 8\n"));
    assert!(stdout(&semimatch(&["solve", "--convex", "--cost", "triangular", s(&f)])).ends_with("cost 6\n"));
    assert!(stdout(&semimatch(&["solve", "--convex", "--cost", "linear", s(&f)])).ends_with("cost 4\n"));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let malformed = write(&dir, "bad.txt", "p semimatch 1 1 1\ne 1 2 1\n");
    assert_eq!(semimatch(&["solve", s(&malformed)]).status.code(), Some(3));
    let negative = write(&dir, "neg.txt", "p semimatch 1 1 1\ne 1 1 -4\n");
    assert_eq!(semimatch(&["solve", s(&negative)]).status.code(), Some(3));
    let infeasible = write(&dir, "inf.txt", "p semimatch 2 1 1\ne 1 1 3\n");
    assert_eq!(semimatch(&["solve", s(&infeasible)]).status.code(), Some(4));
    let isolated = write(&dir, "iso.txt", "p cover 3 1\ne 1 2\n");
    assert_eq!(semimatch(&["solve", s(&isolated)]).status.code(), Some(4));
    assert_eq!(semimatch(&["solve", "--weighted", "--cover", s(&malformed)]).status.code(), Some(2));
    assert_eq!(semimatch(&["frobnicate"]).status.code(), Some(2));
    let f = write(&dir, "two_machine.txt", TWO_MACHINE);
    assert_eq!(semimatch(&["solve", "--cover", s(&f)]).status.code(), Some(2));
    assert_eq!(semimatch(&["solve", s(&dir.path().join("missing"))]).status.code(), Some(1));
}

#[test]
fn verify_checks_cost_and_optimality() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "two_machine.txt", TWO_MACHINE);
    let good = write(&dir, "good.txt", "a 1 1\na 2 1\na 3 2\na 4 2\ncost 6\n");
    assert_eq!(semimatch(&["verify", "--optimal", s(&f), s(&good)]).status.code(), Some(0));
    let seed = write(&dir, "seed.txt", "a 1 1\na 2 2\na 3 2\na 4 2\ncost 7\n");
    assert_eq!(semimatch(&["verify", s(&f), s(&seed)]).status.code(), Some(0));
    assert_eq!(semimatch(&["verify", "--optimal", s(&f), s(&seed)]).status.code(), Some(1));
    let lying = write(&dir, "lie.txt", "a 1 1\na 2 2\na 3 2\na 4 2\ncost 6\n");
    assert_eq!(semimatch(&["verify", s(&f), s(&lying)]).status.code(), Some(1));
    let partial = write(&dir, "part.txt", "a 1 1\n");
    assert_eq!(semimatch(&["verify", s(&f), s(&partial)]).status.code(), Some(1));
    let nonadjacent = write(&dir, "nonadj.txt", "a 1 2\na 2 1\na 3 2\na 4 2\n");
    assert_eq!(semimatch(&["verify", s(&f), s(&nonadjacent)]).status.code(), Some(1));
}

#[test]
fn generated_instances_agree_with_oracle() {
    let dir = TempDir::new().unwrap();
    for seed in 0..5 {
        let out = dir.path().join(format!("g{seed}.txt"));
        let seed = seed.to_string();
        let g = semimatch(&["gen", "-n", "6", "-m", "3", "-p", "0.5", "-w", "9", "-s", &seed, "-o", s(&out)]);
        assert_eq!(g.status.code(), Some(0));
        let fast = stdout(&semimatch(&["solve", s(&out)]));
        let brute = stdout(&semimatch(&["oracle", s(&out)]));
        assert_eq!(fast.lines().last(), brute.lines().last());
        let sol = write(&dir, "sol.txt", &fast);
        assert_eq!(semimatch(&["verify", "--optimal", s(&out), s(&sol)]).status.code(), Some(0));
    }
    let a = stdout(&semimatch(&["gen", "-n", "4", "-m", "2", "-p", "0.7", "-s", "9"]));
    let b = stdout(&semimatch(&["gen", "-n", "4", "-m", "2", "-p", "0.7", "-s", "9"]));
    assert_eq!(a, b);
    assert_eq!(semimatch(&["gen", "-n", "4", "-m", "2", "-p", "0"]).status.code(), Some(2));
}

#[test]
fn cover_solve_verify_oracle() {
    let dir = TempDir::new().unwrap();
    let p4 = write(&dir, "p4.txt", "p cover 4 3\ne 1 2\ne 2 3\ne 3 4\n");
    let out = stdout(&semimatch(&["solve", s(&p4)]));
    assert_eq!(out, "e 1 2\ne 3 4\ncost 4\n");
    let sol = write(&dir, "cover.txt", &out);
    assert_eq!(semimatch(&["verify", "--optimal", s(&p4), s(&sol)]).status.code(), Some(0));
    let all = write(&dir, "all.txt", "e 1 2\ne 2 3\ne 3 4\n");
    assert_eq!(semimatch(&["verify", s(&p4), s(&all)]).status.code(), Some(0));
    assert_eq!(semimatch(&["verify", "--optimal", s(&p4), s(&all)]).status.code(), Some(1));
    let gap = write(&dir, "gap.txt", "e 1 2\n");
    assert_eq!(semimatch(&["verify", s(&p4), s(&gap)]).status.code(), Some(1));
    for seed in 0..5 {
        let g = dir.path().join("g.txt");
        let seed = seed.to_string();
        semimatch(&["gen", "--cover", "-n", "7", "-p", "0.4", "-s", &seed, "-o", s(&g)]);
        let fast = stdout(&semimatch(&["solve", "--cover", s(&g)]));
        let brute = stdout(&semimatch(&["oracle", "--cover", s(&g)]));
        assert_eq!(fast.lines().last(), brute.lines().last());
    }
}

#[test]
fn bench_writes_csv() {
    let dir = TempDir::new().unwrap();
    let plan = write(
        &dir,
        "plan.toml",
        "[[run]]\nfamily = \"small\"\njobs = 8\nmachines = 4\nedge_prob = 0.4\nmax_weight = 5\nseeds = [3, 1]\nsolvers = [\"weighted\", \"baseline\", \"brute\"]\n",
    );
    let out = semimatch(&["bench", s(&plan), "--threads", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7);
    assert!(lines[0].starts_with("family,n_jobs,n_machines,edges,max_weight,seed,solver,wall_ms,cost,"));
    let seeds: Vec<&str> = lines[1..].iter().map(|l| l.split(',').nth(5).unwrap()).collect();
    assert_eq!(seeds, ["3", "3", "3", "1", "1", "1"]);

    let empty = write(&dir, "empty.toml", "");
    assert_eq!(stdout(&semimatch(&["bench", s(&empty)])).lines().count(), 1);
    let bad = write(&dir, "bad.toml", "[[run]]\nfamily = 3\n");
    assert_eq!(semimatch(&["bench", s(&bad)]).status.code(), Some(3));
    let weighted_unit = write(
        &dir,
        "wu.toml",
        "[[run]]\nfamily = \"w\"\njobs = 4\nmachines = 2\nedge_prob = 0.5\nmax_weight = 3\nsolvers = [\"unweighted\"]\n",
    );
    assert_eq!(semimatch(&["bench", s(&weighted_unit)]).status.code(), Some(1));
}
