use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Duration;

use dramsey_core::bounds::{derive_bounds, emit_tables, tables, Derivation, FactBase};
use dramsey_core::gfq::{is_admissible, FieldCtx, ResidueSystem};
use dramsey_core::graphs::{
    build_paley, complete_mathon, Digraph, GraphFile, MathonDigraph, PaleyView,
};
use dramsey_core::ttsearch::{
    auto_symmetry, run, scan, CacheRecord, Mode, ResultCache, ScanOptions, ScanOrder, SearchResult,
    SearchStats, SearchTask, SearchValue, Symmetry,
};
use dramsey_core::verifier::{check_structure, check_theorem, CheckReport, VerifyError};
use serde::Serialize;

use crate::schema::{
    BuildOutput, DeriveOutput, FieldInfo, ScanOutput, SearchOutput, TablesOutput, VerifyOutput,
};
use crate::{
    BoundsCmd, BuildCmd, Cli, CliError, Command, FieldCmd, Format, GraphKind, MethodArg, ScanArgs,
    SearchCmd, VerifyCmd, KQ,
};

type Out<'a> = &'a mut dyn Write;

fn io_err(e: std::io::Error) -> CliError {
    CliError::Runtime(e.to_string())
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

fn runtime(e: impl ToString) -> CliError {
    CliError::Runtime(e.to_string())
}

fn emit_json(out: Out<'_>, doc: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(doc).map_err(runtime)?;
    writeln!(out, "{text}").map_err(io_err)
}

fn residues(kq: &KQ) -> Result<ResidueSystem, CliError> {
    ResidueSystem::for_order(kq.k, kq.q).map_err(usage)
}

fn open_cache(cli: &Cli) -> Result<ResultCache, CliError> {
    if cli.global.no_cache {
        Ok(ResultCache::in_memory())
    } else {
        ResultCache::open(&cli.global.cache).map_err(runtime)
    }
}

fn budget(cli: &Cli) -> Result<Option<Duration>, CliError> {
    cli.global
        .budget
        .map(|s| {
            Duration::try_from_secs_f64(s)
                .map_err(|_| usage(format!("bad budget `{s}`: expected seconds >= 0")))
        })
        .transpose()
}

fn chain(w: &[u32]) -> String {
    w.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

pub(crate) fn dispatch(cli: &Cli, out: Out<'_>) -> Result<(), CliError> {
    match &cli.command {
        Command::Field(FieldCmd::Info { q }) => field_info(cli, *q, out),
        Command::Build(cmd) => build(cli, cmd, out),
        Command::Search(cmd) => search(cli, cmd, out),
        Command::Scan(args) => scan_cmd(cli, args, out),
        Command::Verify(cmd) => verify(cli, cmd, out),
        Command::Bounds(cmd) => bounds(cli, cmd, out),
    }
}

fn field_info(cli: &Cli, q: u64, out: Out<'_>) -> Result<(), CliError> {
    let f = FieldCtx::new(q).map_err(usage)?;
    let info = FieldInfo {
        q,
        p: f.characteristic(),
        n: f.degree(),
        modulus: f.modulus().to_vec(),
        modulus_text: f.modulus_string(),
        omega: f.omega(),
        omega_text: f.element_string(f.omega()),
        admissible_k: (2..=20)
            .step_by(2)
            .filter(|&k| is_admissible(k, q))
            .collect(),
    };
    if cli.global.format == Format::Json {
        return emit_json(out, &info);
    }
    let ks: Vec<String> = info.admissible_k.iter().map(u32::to_string).collect();
    writeln!(out, "GF({}) = GF({}^{})", q, info.p, info.n).map_err(io_err)?;
    writeln!(out, "modulus: {}", info.modulus_text).map_err(io_err)?;
    writeln!(out, "omega: {} ({})", info.omega, info.omega_text).map_err(io_err)?;
    let ks = if ks.is_empty() {
        "none".to_string()
    } else {
        ks.join(" ")
    };
    writeln!(out, "admissible k <= 20: {ks}").map_err(io_err)
}

fn build(cli: &Cli, cmd: &BuildCmd, out: Out<'_>) -> Result<(), CliError> {
    let (file, path) = match cmd {
        BuildCmd::Paley { kq, out } => (
            GraphFile::from_tournament(&build_paley(&residues(kq)?)),
            out,
        ),
        BuildCmd::Mathon { kq, seed, out } => {
            let m = MathonDigraph::build(&residues(kq)?);
            let file = match seed {
                Some(s) => GraphFile::from_tournament(&complete_mathon(&m, *s)),
                None => GraphFile::from_mathon(&m),
            };
            (file, out)
        }
    };
    let text = file.to_text();
    if let Some(p) = path {
        fs::write(p, &text).map_err(|e| runtime(format!("{}: {e}", p.display())))?;
    }
    let h = &file.header;
    let summary = BuildOutput {
        family: h.family.name().to_string(),
        k: h.k,
        q: h.q.into(),
        n: h.n,
        seed: h.seed,
        arc_lines: file.arcs.len(),
        digon_pairs: file.arcs.iter().filter(|a| a.2 == 0).count() / 2,
        path: path.as_ref().map(|p| p.display().to_string()),
        file: path.is_none().then(|| text.clone()),
    };
    match (cli.global.format, path) {
        (Format::Json, _) => emit_json(out, &summary),
        (Format::Text, None) => out.write_all(text.as_bytes()).map_err(io_err),
        (Format::Text, Some(p)) => writeln!(
            out,
            "wrote {}: {} k={} q={} n={} with {} arc lines ({} digon pairs)",
            p.display(),
            summary.family,
            summary.k,
            summary.q,
            summary.n,
            summary.arc_lines,
            summary.digon_pairs
        )
        .map_err(io_err),
    }
}

fn search(cli: &Cli, cmd: &SearchCmd, out: Out<'_>) -> Result<(), CliError> {
    let (args, mode) = match cmd {
        SearchCmd::Exists(a) => (
            a,
            Mode::Exists(a.m.ok_or_else(|| usage("search exists needs --m"))?),
        ),
        SearchCmd::Count(a) => (
            a,
            Mode::Count(a.m.ok_or_else(|| usage("search count needs --m"))?),
        ),
        SearchCmd::Max(a) => (a, Mode::Max(a.m)),
    };
    let rs = residues(&args.kq)?;
    let (view, mathon, completion);
    let graph: &dyn Digraph = match args.graph {
        GraphKind::Paley => {
            view = PaleyView::new(rs);
            &view
        }
        GraphKind::Mathon => {
            mathon = MathonDigraph::build(&rs);
            &mathon
        }
        GraphKind::Completion => {
            completion = complete_mathon(&MathonDigraph::build(&rs), args.seed);
            &completion
        }
    };
    let symmetry = match (args.method, mode) {
        (MethodArg::Brute, _) => Symmetry::None,
        (MethodArg::Symmetric, Mode::Count(1)) if graph.paley_residues().is_some() => {
            Symmetry::VertexTransitive
        }
        (MethodArg::Symmetric, _) => auto_symmetry(graph),
    };
    let m = match mode {
        Mode::Exists(m) | Mode::Count(m) => Some(m),
        Mode::Max(limit) => limit,
    };
    // cache keys carry no graph family, so only Paley searches are cached
    let cacheable = args.graph == GraphKind::Paley;
    let mut cache = if cacheable {
        Some(open_cache(cli)?)
    } else {
        None
    };
    let hit = cache
        .as_ref()
        .and_then(|c| c.lookup(args.kq.k, args.kq.q, m, mode.kind(), args.color))
        .and_then(|r| SearchValue::from_json(r.kind, &r.value).map(|v| (v, r.clone())));
    let (result, cached) = match hit {
        Some((value, rec)) => (
            SearchResult {
                kind: rec.kind,
                value,
                witness: rec.witness,
                stats: SearchStats {
                    nodes: 0,
                    elapsed_ms: 0,
                },
                complete: true,
            },
            true,
        ),
        None => {
            let task = SearchTask::new(graph, args.color, mode)
                .symmetry(symmetry)
                .budget(budget(cli)?);
            let r = run(&task).map_err(usage)?;
            if let Some(c) = cache.as_mut() {
                c.append(CacheRecord::from_search(
                    args.kq.k, args.kq.q, m, args.color, &r,
                ))
                .map_err(runtime)?;
            }
            (r, false)
        }
    };
    let graph_name = match args.graph {
        GraphKind::Paley => "paley",
        GraphKind::Mathon => "mathon",
        GraphKind::Completion => "mathon-star",
    };
    let doc = SearchOutput {
        graph: graph_name.to_string(),
        k: args.kq.k,
        q: args.kq.q,
        seed: (args.graph == GraphKind::Completion).then_some(args.seed),
        kind: result.kind,
        m,
        color: args.color,
        value: result.value,
        witness: result.witness.clone(),
        complete: result.complete,
        cached,
        nodes: result.stats.nodes,
        elapsed_ms: result.stats.elapsed_ms,
    };
    if cli.global.format == Format::Json {
        return emit_json(out, &doc);
    }
    let what = format!("{graph_name} k={} q={} color {}", doc.k, doc.q, doc.color);
    let line = match (mode, doc.value) {
        (Mode::Exists(m), SearchValue::Exists(b)) => {
            format!("TT_{m} in {what}: {}", if b { "found" } else { "none" })
        }
        (Mode::Count(m), SearchValue::Count(c)) => format!("TT_{m} count in {what}: {c}"),
        (Mode::Max(_), SearchValue::Max(l)) => format!("largest TT in {what}: order {l}"),
        _ => unreachable!("result kind follows the mode"),
    };
    writeln!(out, "{line}").map_err(io_err)?;
    if let Some(w) = &doc.witness {
        writeln!(out, "witness: {}", chain(w)).map_err(io_err)?;
    }
    if !doc.complete {
        writeln!(out, "partial: time budget exhausted").map_err(io_err)?;
    }
    Ok(())
}

fn scan_cmd(cli: &Cli, args: &ScanArgs, out: Out<'_>) -> Result<(), CliError> {
    let mut cache = open_cache(cli)?;
    let opts = ScanOptions {
        order: if args.ascending {
            ScanOrder::Ascending
        } else {
            ScanOrder::Descending
        },
        budget: budget(cli)?,
    };
    let outcome = scan(args.k, args.m, args.q_max, &mut cache, opts).map_err(usage)?;
    if cli.global.format == Format::Json {
        let cache = cache.path().map(|p| p.display().to_string());
        return emit_json(out, &ScanOutput { outcome, cache });
    }
    for s in &outcome.steps {
        let verdict = match s.has_tt {
            Some(true) => format!("TT_{} present", args.m),
            Some(false) => format!("no TT_{}", args.m),
            None => "undecided (time budget exhausted)".to_string(),
        };
        writeln!(out, "q={}: {verdict}", s.q).map_err(io_err)?;
    }
    match outcome.largest {
        Some(q) => {
            let note = if outcome.at_limit {
                " (at the search limit; a larger --q-max may raise it)"
            } else {
                ""
            };
            writeln!(
                out,
                "largest q <= {} with no TT_{} for k={}: {q}{note}",
                args.q_max, args.m, args.k
            )
        }
        None => writeln!(
            out,
            "every admissible q <= {} contains TT_{} for k={}",
            args.q_max, args.m, args.k
        ),
    }
    .map_err(io_err)
}

fn verify(cli: &Cli, cmd: &VerifyCmd, out: Out<'_>) -> Result<(), CliError> {
    let reports: Vec<CheckReport> = match cmd {
        VerifyCmd::Structure { kq } => check_structure(&MathonDigraph::build(&residues(kq)?)),
        VerifyCmd::Theorem {
            kq,
            m,
            trials,
            seed,
        } => {
            residues(kq)?;
            let r = check_theorem(kq.k, kq.q, *m, *trials, *seed).map_err(|e| match e {
                VerifyError::Search(e) => runtime(e),
                other => usage(other),
            })?;
            vec![r]
        }
    };
    if !cli.global.no_cache {
        let mut cache = open_cache(cli)?;
        for r in &reports {
            cache.append(r.to_record()).map_err(runtime)?;
        }
    }
    let passed = reports.iter().all(CheckReport::passed);
    if cli.global.format == Format::Json {
        emit_json(out, &VerifyOutput { passed, reports })?;
    } else {
        for r in &reports {
            writeln!(out, "{r}").map_err(io_err)?;
        }
    }
    if passed {
        Ok(())
    } else {
        Err(CliError::CheckFailed)
    }
}

fn load_facts(path: Option<&Path>) -> Result<FactBase, CliError> {
    match path {
        Some(p) => FactBase::load(p).map_err(usage),
        None => Ok(FactBase::shipped()),
    }
}

fn describe(d: &Derivation) -> String {
    let flag = |f: bool| if f { " [search-limited]" } else { "" };
    match d {
        Derivation::Fact { source, exact, .. } => {
            format!(
                "{} ({source})",
                if *exact { "known value" } else { "known bound" }
            )
        }
        Derivation::Direct {
            m, k, q, at_limit, ..
        } => format!("q(m={m},k={k}) + 1 = {q} + 1{}", flag(*at_limit)),
        Derivation::Mathon {
            k,
            base_m,
            q,
            at_limit,
            ..
        } => {
            format!(
                "{k}(q(m={base_m},k={k}) + 1) + 1 = {k}({q} + 1) + 1{}",
                flag(*at_limit)
            )
        }
        Derivation::Product { left, right, .. } => {
            let v = |d: &Derivation| d.value().map_or("?".to_string(), |v| v.to_string());
            let (lt, lm) = left.target();
            let (rt, rm) = right.target();
            format!(
                "(R_{lt}({lm}) - 1)(R_{rt}({rm}) - 1) + 1 = ({} - 1)({} - 1) + 1",
                v(left),
                v(right)
            )
        }
    }
}

fn bounds(cli: &Cli, cmd: &BoundsCmd, out: Out<'_>) -> Result<(), CliError> {
    let facts = load_facts(cli.global.facts.as_deref())?;
    match cmd {
        BoundsCmd::Derive { t_max, m_max } => {
            if *t_max < 1 || *m_max < 3 {
                return Err(usage("bounds derive needs --t-max >= 1 and --m-max >= 3"));
            }
            let table = derive_bounds(&facts, *t_max, *m_max);
            if cli.global.format == Format::Json {
                return emit_json(out, &DeriveOutput { table });
            }
            for t in 1..=*t_max {
                for m in 3..=*m_max {
                    match table.get(t, m) {
                        Some(e) => {
                            let rel = if e.exact { "=" } else { ">=" };
                            writeln!(
                                out,
                                "R_{t}({m}) {rel} {}  via {}: {}",
                                e.value,
                                e.provenance.rule(),
                                describe(&e.provenance)
                            )
                        }
                        None => writeln!(out, "R_{t}({m}) >= ?  (no data)"),
                    }
                    .map_err(io_err)?;
                }
            }
            Ok(())
        }
        BoundsCmd::Tables => {
            let text = emit_tables(&facts);
            if cli.global.format == Format::Json {
                emit_json(
                    out,
                    &TablesOutput {
                        tables: tables(&facts),
                        text,
                    },
                )
            } else {
                out.write_all(text.as_bytes()).map_err(io_err)
            }
        }
    }
}
