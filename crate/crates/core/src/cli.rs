//! Command line front end.
//!
//! Every subcommand writes one JSON document to stdout and a short human
//! summary to stderr. Exit codes: `0` success, `1` not a member or a failed
//! verification, `2` usage error.

use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::characterization::{
    classify, classify_and_witness, even_family_sweep, witness_cyclic, witness_even_form,
    witness_z2d8, witness_z2q8, ClassifyError, GroupTag, WitnessError,
};
use crate::factored::{det_pack, theorem1_eval, PackGroup, QuartetPack};
use crate::groupring::{det_naive, GroupRingElement};
use crate::groups::{make_cyclic, parse_group, FiniteGroup};
use crate::search::{
    classification_violations, cross_check, run_search, summary_path, CrossTarget, SearchError,
    SearchJob, SearchMode, SearchTarget,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "groupdet", version, about = "Exact integer group determinants")]
struct Cli {
    /// Emit JSON on stdout (always on).
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Determinant of one group ring element.
    Compute {
        #[arg(long)]
        group: String,
        /// JSON array in group order, or a pack object `{"f1": [..], ..}`.
        #[arg(long)]
        coeffs: String,
    },
    /// Membership verdict with certificate.
    Classify {
        #[arg(long)]
        group: String,
        #[arg(long, allow_hyphen_values = true)]
        value: String,
    },
    /// Explicit element realising a member value.
    Witness {
        #[arg(long)]
        group: String,
        #[arg(long, allow_hyphen_values = true)]
        value: String,
    },
    /// Enumerate determinant values over a coefficient box.
    Search {
        #[arg(long)]
        group: String,
        /// `lo,hi`
        #[arg(long, allow_hyphen_values = true)]
        range: String,
        /// Sample this many vectors instead of sweeping the box.
        #[arg(long)]
        sample: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads, 0 for automatic.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Oracle equivalence and witness closure at small scale.
    Selfcheck {
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Odd values up to this bound are witnessed.
        #[arg(long, default_value_t = 500)]
        limit: i128,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
}

struct Output<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Output<'_> {
    fn emit(&mut self, doc: &Value, code: i32) -> i32 {
        let text = serde_json::to_string_pretty(doc).expect("serializable");
        if writeln!(self.out, "{text}").is_err() {
            return EXIT_FAIL;
        }
        code
    }

    fn note(&mut self, msg: &str) {
        let _ = writeln!(self.err, "{msg}");
    }

    fn usage(&mut self, msg: &str) -> i32 {
        self.note(&format!("error: {msg}"));
        EXIT_USAGE
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let mut io = Output { out, err };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(io.out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(io.err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match cli.command {
        Command::Compute { group, coeffs } => compute(&mut io, &group, &coeffs),
        Command::Classify { group, value } => classify_cmd(&mut io, &group, &value),
        Command::Witness { group, value } => witness_cmd(&mut io, &group, &value),
        Command::Search {
            group,
            range,
            sample,
            seed,
            out,
            threads,
        } => search_cmd(&mut io, &group, &range, sample, seed, out, threads),
        Command::Selfcheck {
            count,
            seed,
            limit,
            threads,
        } => selfcheck(&mut io, count, seed, limit, threads),
    }
}

/// Runs with the process arguments and standard streams.
pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn pack_variant(name: &str) -> Option<PackGroup> {
    match name.trim().to_ascii_lowercase().as_str() {
        "z2xd8" => Some(PackGroup::Z2xD8),
        "z2xq8" => Some(PackGroup::Z2xQ8),
        _ => None,
    }
}

fn json_integer(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .or_else(|| n.as_u64().map(BigInt::from)),
        Value::String(s) => BigInt::from_str(s.trim()).ok(),
        _ => None,
    }
}

fn parse_coeffs(text: &str, group: &FiniteGroup) -> Result<Vec<BigInt>, String> {
    let doc: Value = serde_json::from_str(text).map_err(|e| format!("--coeffs: {e}"))?;
    let coeffs = match &doc {
        Value::Array(items) => items
            .iter()
            .map(|v| json_integer(v).ok_or_else(|| format!("--coeffs: {v} is not an integer")))
            .collect::<Result<Vec<_>, _>>()?,
        Value::Object(_) => {
            let pack: QuartetPack =
                serde_json::from_value(doc.clone()).map_err(|e| format!("--coeffs pack: {e}"))?;
            pack.to_vector().iter().map(|&c| BigInt::from(c)).collect()
        }
        _ => return Err("--coeffs must be a JSON array or pack object".into()),
    };
    if coeffs.len() != group.order() {
        return Err(format!(
            "--coeffs has {} entries, {} needs {}",
            coeffs.len(),
            group.name(),
            group.order()
        ));
    }
    Ok(coeffs)
}

/// `z<n>x<rest>` split for the root-of-unity evaluation.
fn cyclic_head(name: &str) -> Option<(usize, FiniteGroup)> {
    let lower = name.trim().to_ascii_lowercase();
    let (head, rest) = lower.split_once('x')?;
    let n: usize = head.strip_prefix('z')?.parse().ok()?;
    make_cyclic(n).ok()?;
    Some((n, parse_group(rest).ok()?))
}

fn compute(io: &mut Output<'_>, name: &str, coeffs: &str) -> i32 {
    let group = match parse_group(name) {
        Ok(g) => Arc::new(g),
        Err(e) => return io.usage(&e.to_string()),
    };
    let coeffs = match parse_coeffs(coeffs, &group) {
        Ok(c) => c,
        Err(e) => return io.usage(&e),
    };
    let x = GroupRingElement::new(Arc::clone(&group), coeffs.clone()).expect("length checked");
    let naive = det_naive(&x);
    let mut doc = json!({
        "group": group.name(),
        "naive": naive.to_string(),
    });
    let mut agree = true;
    if let Some(variant) = pack_variant(name) {
        let small: Option<Vec<i64>> = coeffs.iter().map(|c| i64::try_from(c).ok()).collect();
        match small.map(|v| QuartetPack::from_vector(&v)) {
            Some(Ok(pack)) => {
                let b = det_pack(&pack, variant);
                agree &= b.total == naive;
                doc["pack"] = serde_json::to_value(pack).expect("serializable");
                doc["total"] = json!(b.total.to_string());
                doc["breakdown"] = serde_json::to_value(&b).expect("serializable");
            }
            _ => io.note("coefficients exceed 64 bits; closed form skipped"),
        }
    } else {
        doc["total"] = json!(naive.to_string());
    }
    if let Some((n, h)) = cyclic_head(name) {
        match theorem1_eval(n, &h, &coeffs) {
            Ok(r) => {
                agree &= r.total == naive;
                doc["root_factors"] = serde_json::to_value(&r).expect("serializable");
            }
            Err(e) => io.note(&format!("root-of-unity evaluation skipped: {e}")),
        }
    }
    doc["agree"] = json!(agree);
    io.note(&format!("{}: determinant {naive}", group.name()));
    io.emit(&doc, if agree { EXIT_OK } else { EXIT_FAIL })
}

fn parse_value(text: &str) -> Result<i128, String> {
    i128::from_str(text.trim()).map_err(|e| format!("--value {text}: {e}"))
}

fn classify_error_code(e: &ClassifyError) -> i32 {
    match e {
        ClassifyError::TestsDisagree(_) => EXIT_FAIL,
        _ => EXIT_USAGE,
    }
}

fn classify_cmd(io: &mut Output<'_>, group: &str, value: &str) -> i32 {
    let tag: GroupTag = match group.parse() {
        Ok(t) => t,
        Err(e) => return io.usage(&format!("{e}")),
    };
    let n = match parse_value(value) {
        Ok(n) => n,
        Err(e) => return io.usage(&e),
    };
    match classify(tag, n) {
        Ok(v) => {
            let verified = v.verify();
            io.note(&format!(
                "{n} on {tag}: {}",
                if v.member { "member" } else { "not a member" }
            ));
            let mut doc = serde_json::to_value(v).expect("serializable");
            doc["verified"] = json!(verified);
            io.emit(
                &doc,
                if v.member && verified {
                    EXIT_OK
                } else {
                    EXIT_FAIL
                },
            )
        }
        Err(e) => {
            io.note(&format!("error: {e}"));
            classify_error_code(&e)
        }
    }
}

fn witness_cmd(io: &mut Output<'_>, group: &str, value: &str) -> i32 {
    let tag: GroupTag = match group.parse() {
        Ok(t) => t,
        Err(e) => return io.usage(&format!("{e}")),
    };
    let n = match parse_value(value) {
        Ok(n) => n,
        Err(e) => return io.usage(&e),
    };
    let result = match tag {
        GroupTag::Z2xCyclic { t } => witness_cyclic(n, t),
        _ => classify_and_witness(tag, n).and_then(|(v, w)| {
            w.ok_or(WitnessError::NotMember {
                value: v.value,
                group: v.group,
            })
        }),
    };
    match result {
        Ok(w) => {
            io.note(&format!("{n} on {tag}: {} witness verified", w.family));
            io.emit(&serde_json::to_value(&w).expect("serializable"), EXIT_OK)
        }
        Err(WitnessError::Classify(e)) => {
            io.note(&format!("error: {e}"));
            classify_error_code(&e)
        }
        Err(e) => {
            io.note(&format!("{n} on {tag}: {e}"));
            let doc = json!({
                "group": tag.to_string(),
                "claimed_value": n.to_string(),
                "verified": false,
                "error": e.to_string(),
            });
            io.emit(&doc, EXIT_FAIL)
        }
    }
}

fn parse_range(text: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = text
        .split_once(',')
        .ok_or_else(|| format!("--range {text}: expected lo,hi"))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<i64>()
            .map_err(|e| format!("--range {text}: {e}"))
    };
    Ok((parse(lo)?, parse(hi)?))
}

fn search_cmd(
    io: &mut Output<'_>,
    group: &str,
    range: &str,
    sample: Option<u64>,
    seed: u64,
    out: Option<PathBuf>,
    threads: usize,
) -> i32 {
    let (lo, hi) = match parse_range(range) {
        Ok(r) => r,
        Err(e) => return io.usage(&e),
    };
    let variant = pack_variant(group);
    let target = match variant {
        Some(v) => SearchTarget::Pack(v),
        None => match parse_group(group) {
            Ok(g) => SearchTarget::Group(Arc::new(g)),
            Err(e) => return io.usage(&e.to_string()),
        },
    };
    let mode = match sample {
        Some(count) => SearchMode::Sample { count, seed },
        None => SearchMode::Exhaustive,
    };
    let job = SearchJob {
        target,
        lo,
        hi,
        mode,
        output: out.clone(),
        threads,
    };
    let outcome = match run_search(&job) {
        Ok(o) => o,
        Err(e) => {
            io.note(&format!("error: {e}"));
            return match e {
                SearchError::Overflow(_) | SearchError::Unverified { .. } => EXIT_FAIL,
                _ => EXIT_USAGE,
            };
        }
    };
    let violations: Vec<String> = variant
        .map(|v| classification_violations(v, &outcome.records))
        .unwrap_or_default()
        .iter()
        .map(i128::to_string)
        .collect();
    io.note(&format!(
        "{}: {} vectors, {} distinct values, {} classification violations",
        job.target.name(),
        outcome.evaluated,
        outcome.records.len(),
        violations.len()
    ));
    let doc = json!({
        "group": job.target.name(),
        "range": [lo, hi],
        "search_mode": mode,
        "evaluated": outcome.evaluated,
        "distinct_values": outcome.records.len(),
        "min_value": outcome.records.first().map(|r| r.value.to_string()),
        "max_value": outcome.records.last().map(|r| r.value.to_string()),
        "classified": variant.is_some(),
        "violations": violations,
        "out": out.as_ref().map(|p| p.display().to_string()),
        "summary": out.as_ref().map(|p| summary_path(p).display().to_string()),
    });
    let code = if violations.is_empty() {
        EXIT_OK
    } else {
        EXIT_FAIL
    };
    io.emit(&doc, code)
}

fn check_row(name: &str, passed: usize, failed: usize) -> Value {
    json!({ "name": name, "passed": passed, "failed": failed })
}

fn selfcheck(io: &mut Output<'_>, count: usize, seed: u64, limit: i128, threads: usize) -> i32 {
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => return io.usage(&e.to_string()),
    };
    let rows = pool.install(|| {
        let mut rows = Vec::new();
        let mut targets = vec![
            CrossTarget::Pack(PackGroup::Z2xD8),
            CrossTarget::Pack(PackGroup::Z2xQ8),
        ];
        for (n, h) in [(2, "z2"), (2, "d8"), (2, "q8"), (3, "z2"), (4, "z1")] {
            let h = Arc::new(parse_group(h).expect("fixed group"));
            targets.push(CrossTarget::Theorem1 { n, h });
        }
        for t in &targets {
            let r = cross_check(t, count, seed, 2);
            rows.push(check_row(
                &format!("oracle:{}", r.target),
                r.checked - r.mismatches.len(),
                r.mismatches.len(),
            ));
        }
        for (tag, build) in [
            (GroupTag::Z2xD8, witness_z2d8 as fn(i128) -> Result<_, _>),
            (GroupTag::Z2xQ8, witness_z2q8),
        ] {
            let (mut ok, mut bad) = (0, 0);
            for n in (-limit..=limit).filter(|n| n % 2 != 0) {
                match classify(tag, n) {
                    Ok(v) if v.member => match build(n) {
                        Ok(w) if w.verified => ok += 1,
                        _ => bad += 1,
                    },
                    Ok(_) => {}
                    Err(_) => bad += 1,
                }
            }
            for f in even_family_sweep(tag) {
                match witness_even_form(&f) {
                    Ok(w) if w.verified => ok += 1,
                    _ => bad += 1,
                }
            }
            rows.push(check_row(&format!("witness:{tag}"), ok, bad));
        }
        rows
    });
    let failed: usize = rows
        .iter()
        .map(|r| r["failed"].as_u64().unwrap_or(0) as usize)
        .sum();
    for r in &rows {
        io.note(&format!(
            "{}: {} passed, {} failed",
            r["name"].as_str().unwrap_or("?"),
            r["passed"],
            r["failed"]
        ));
    }
    let doc = json!({ "checks": rows, "passed": failed == 0 });
    io.emit(&doc, if failed == 0 { EXIT_OK } else { EXIT_FAIL })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("groupdet").chain(args.iter().copied());
        let code = run_with(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn classify_non_member_exits_one() {
        let (code, out, _) = run(&["classify", "--group", "z2xd8", "--value", "89"]);
        assert_eq!(code, EXIT_FAIL);
        let doc: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(doc["member"], json!(false));
    }

    #[test]
    fn witness_prints_pack() {
        let (code, out, _) = run(&["witness", "--group", "z2xq8", "--value", "17", "--json"]);
        assert_eq!(code, EXIT_OK);
        let doc: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(doc["payload"]["pack"]["f2"], json!([1, 1, 1, 1]));
        assert_eq!(doc["verified"], json!(true));
    }

    #[test]
    fn compute_identity() {
        let mut v = vec!["0"; 16];
        v[0] = "1";
        let coeffs = format!("[{}]", v.join(","));
        let (code, out, _) = run(&["compute", "--group", "z2xd8", "--coeffs", &coeffs]);
        assert_eq!(code, EXIT_OK);
        let doc: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(doc["total"], json!("1"));
        assert_eq!(doc["naive"], json!("1"));
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(
            run(&["compute", "--group", "z2xd8", "--coeffs", "[1,2]"]).0,
            EXIT_USAGE
        );
        assert_eq!(
            run(&["classify", "--group", "q9", "--value", "1"]).0,
            EXIT_USAGE
        );
        assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run(&["--help"]).0, EXIT_OK);
    }
}
