use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pathsys_cli::read_dump;
use pathsys_cli::report::Report;
use pathsys_core::metrizability::verify_certificate;
use pathsys_core::pathsys::petersen_fixture;

fn pathsys(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pathsys"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pathsys-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn report(out: &Output) -> Report {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    Report::from_text(&text).unwrap_or_else(|e| panic!("{e}: {text}"))
}

fn verdict<'a>(r: &'a Report, name: &str) -> &'a str {
    &r.check(name).unwrap_or_else(|| panic!("no check {name}")).verdict
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

const TREE: &str = "pathsystem v1
vertices 4 labels 1 2 3 4
edge 1 2
edge 2 3
edge 2 4
path 1 2 : 1 2
path 1 3 : 1 2 3
path 1 4 : 1 2 4
path 2 3 : 2 3
path 2 4 : 2 4
path 3 4 : 3 2 4
";

#[test]
fn bundled_fixture_matches_library() {
    let text = std::fs::read_to_string(fixture("petersen.txt")).unwrap();
    assert_eq!(text, petersen_fixture().1.to_text());
}

#[test]
fn petersen_check_with_dump() {
    let dump = scratch("petersen.dump");
    let out = pathsys(&[
        "check",
        "--input",
        fixture("petersen.txt").to_str().unwrap(),
        "--dump-certificate",
        dump.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(verdict(&r, "consistent"), "yes");
    assert_eq!(verdict(&r, "metrizable"), "NO");
    assert_eq!(verdict(&r, "reducible"), "YES");
    assert!(r.check("reducible").unwrap().artifact.contains("verified=yes"));

    let (sys, v) = read_dump(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    assert!(v.is_infeasible());
    assert!(verify_certificate(&sys, &v).unwrap());
}

#[test]
fn tree_is_metrizable_with_unit_weights() {
    let input = scratch("tree.txt");
    std::fs::write(&input, TREE).unwrap();
    let out = pathsys(&["check", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(verdict(&r, "metrizable"), "YES");
    assert!(r.check("metrizable").unwrap().artifact.starts_with("all-ones witness"));
}

#[test]
fn missing_pair_is_an_input_error() {
    let input = scratch("missing.txt");
    let truncated: Vec<&str> = TREE.lines().take(10).collect();
    std::fs::write(&input, truncated.join("\n")).unwrap();
    let out = pathsys(&["check", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 10: pair {3,4} has no path"), "{}", stderr(&out));
}

#[test]
fn inadmissible_primes() {
    let out = pathsys(&["paley-verify", "--prime", "27"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("27 is not prime"));
    let out = pathsys(&["paley-verify", "--prime", "13"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("3 is a quadratic residue mod 13"));
}

#[test]
fn full_run_at_29() {
    let out = pathsys(&["paley-verify", "--prime", "29", "--direct-lp", "--search-reduction"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let names: Vec<&str> = r.checks.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(
        names,
        ["consistent", "symmetric", "symmetrized", "direct", "reduced-digraph", "reduction"]
    );
    assert_eq!(verdict(&r, "consistent"), "yes");
    assert_eq!(verdict(&r, "symmetric"), "yes");
    assert_eq!(verdict(&r, "symmetrized"), "INFEASIBLE");
    assert_eq!(verdict(&r, "direct"), "INFEASIBLE");
    assert_eq!(verdict(&r, "reduction"), "NONE");
    for name in ["symmetrized", "direct"] {
        assert!(r.check(name).unwrap().artifact.contains("verified=yes"));
    }
}

#[test]
fn heavy_checks_are_opt_in() {
    let r = report(&pathsys(&["paley-verify", "--prime", "53"]));
    assert!(r.check("direct").is_none() && r.check("reduction").is_none());
    assert_eq!(verdict(&r, "symmetrized"), "INFEASIBLE");
}

#[test]
fn exhausted_budget_exits_3() {
    let out = pathsys(&["paley-verify", "--prime", "29", "--search-reduction", "--budget", "5"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(verdict(&report(&out), "reduction"), "BUDGET-EXHAUSTED");
}

#[test]
fn strategies_are_selectable() {
    let petersen = fixture("petersen.txt");
    let out = pathsys(&[
        "check",
        "--input",
        petersen.to_str().unwrap(),
        "--solver",
        "bounded-primal",
        "--search",
        "enumerate",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(verdict(&r, "metrizable"), "NO");
    assert!(r.check("metrizable").unwrap().artifact.contains("by bounded-primal"));
    assert_eq!(verdict(&r, "reducible"), "YES");
    assert!(r.check("reducible").unwrap().artifact.contains("by enumerate"));

    let out = pathsys(&["check", "--input", petersen.to_str().unwrap(), "--solver", "simplex-9000"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("simplex-9000"));
}

/// The same facts in both formats; only timings and the echoed flag differ.
#[test]
fn text_and_structured_reports_agree() {
    let args = ["paley-verify", "--prime", "29", "--search-reduction"];
    let text = report(&pathsys(&args));
    let json_out = pathsys(&[&args[..], &["--format", "structured"]].concat());
    let json = Report::from_json(&String::from_utf8(json_out.stdout).unwrap()).unwrap();
    let facts = |r: &Report| {
        (
            r.input_digest.clone(),
            r.status,
            r.checks
                .iter()
                .map(|c| (c.name.clone(), c.verdict.clone(), c.artifact.clone()))
                .collect::<Vec<_>>(),
        )
    };
    assert_eq!(facts(&text), facts(&json));
    assert_eq!(Report::from_text(&json.to_text()).unwrap(), json);
}

#[test]
fn audit_csv() {
    let csv = scratch("audit.csv");
    let out = pathsys(&["audit", "--max", "200", "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(verdict(&r, "burgess"), "0 violations");
    assert_eq!(verdict(&r, "nonresidue-runs"), "exceptions [13]");
    assert_eq!(verdict(&r, "common-neighbors"), "0 above 5sqrt(p)+1, 0 above 2sqrt(p)+2");
    assert_eq!(verdict(&r, "admissibility"), "0 disagreements with p = 5 mod 24");

    let table = std::fs::read_to_string(&csv).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("p,L_p,burgess_max_ratio,cn_max_deviation,admissible"));
    let row13: Vec<&str> = lines.clone().find(|l| l.starts_with("13,")).unwrap().split(',').collect();
    assert_eq!(row13[1], "4");
    let row29: Vec<&str> = lines.find(|l| l.starts_with("29,")).unwrap().split(',').collect();
    assert_eq!(row29[4], "true");
    assert!(row29[3].parse::<f64>().unwrap() <= 5.0 * 29f64.sqrt() + 1.0);

    // same seed, same table
    let again = scratch("audit2.csv");
    pathsys(&["audit", "--max", "200", "--csv", again.to_str().unwrap()]);
    assert_eq!(std::fs::read_to_string(&again).unwrap(), table);
}

#[test]
fn empty_audit_range() {
    let out = pathsys(&["audit", "--max", "2"]);
    assert_eq!(out.status.code(), Some(2));
}
