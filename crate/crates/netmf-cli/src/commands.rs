//! Subcommand implementations.

use std::io::Write as _;
use std::path::Path;

use netmf_core::closed_form::{self, ClosedFormMatrix, PteWeights};
use netmf_core::eval::{self, EvalConfig};
use netmf_core::graph::{
    load_bipartite_aligned, load_edge_list_detailed, Graph, IsolatedPolicy, LabelSet,
};
use netmf_core::netmf;
use netmf_core::spectral;
use netmf_core::walk::{self, WalkParams, WalkStart};
use netmf_core::{Error, Result};

use crate::output::{fmt_g12, open_input, provenance_lines, write_atomic};
use crate::{
    usage, CliError, CliResult, ClosedFormArgs, EmbedArgs, EvalArgs, IsolatedArg, Mode, ModelArg,
    SimModelArg, SimulateArgs, SpectrumArgs, StartArg,
};

fn policy(arg: IsolatedArg) -> IsolatedPolicy {
    match arg {
        IsolatedArg::Reject => IsolatedPolicy::Reject,
        IsolatedArg::Drop => IsolatedPolicy::Drop,
    }
}

/// Load a graph, print drop warnings and the connectivity/bipartiteness
/// report to stderr.
fn load_graph(path: &Path, isolated: IsolatedArg) -> Result<Graph> {
    let (graph, dropped) = load_edge_list_detailed(open_input(path)?, policy(isolated))?;
    for token in &dropped {
        eprintln!("warning: dropped isolated vertex \"{token}\"");
    }
    if !graph.is_connected() {
        eprintln!("note: graph is not connected; stationary-walk theory assumes connectivity");
    }
    if graph.is_bipartite() {
        eprintln!("note: graph is bipartite; random-walk limits assume non-bipartiteness");
    }
    Ok(graph)
}

fn check_window(window: usize) -> CliResult<()> {
    if window == 0 {
        return Err(usage("--window must be at least 1"));
    }
    Ok(())
}

fn check_neg(b: f64) -> CliResult<()> {
    if !(b > 0.0) {
        return Err(usage("--neg must be positive"));
    }
    Ok(())
}

pub fn run_embed(args: EmbedArgs) -> CliResult<()> {
    check_window(args.window)?;
    check_neg(args.neg)?;
    if args.dim == 0 {
        return Err(usage("--dim must be at least 1"));
    }
    match args.mode {
        Mode::Exact => {
            if args.rank.is_some() {
                return Err(usage(
                    "--rank only applies to --mode approx; drop it or switch modes",
                ));
            }
        }
        Mode::Approx => {
            if args.rank.is_none() {
                return Err(usage(
                    "--mode approx needs --rank (the number of eigenpairs to keep, e.g. --rank 256)",
                ));
            }
        }
    }

    let graph = load_graph(&args.input, args.isolated)?;
    let embedding = match args.mode {
        Mode::Exact => netmf::netmf_exact_capped(
            &graph,
            args.window,
            args.neg,
            args.dim,
            args.seed,
            args.dense_cap,
        )?,
        Mode::Approx => netmf::netmf_approx(
            &graph,
            args.window,
            args.neg,
            args.rank.unwrap(),
            args.dim,
            args.seed,
        )?,
    };

    let headers = provenance_lines(
        &format!("embed {}", embedding.provenance()),
        args.deterministic,
    );
    write_atomic(&args.output, |mut w| {
        netmf::write_embedding(
            &mut w,
            &embedding,
            graph.tokens(),
            args.full_precision,
            &headers,
        )
    })?;
    let vocab_path = vocab_sidecar_path(&args.output);
    write_atomic(&vocab_path, |mut w| {
        for line in &headers {
            writeln!(w, "# {line}")?;
        }
        graph.dump_vocab(&mut w)
    })?;
    Ok(())
}

pub fn vocab_sidecar_path(output: &Path) -> std::path::PathBuf {
    let mut os = output.as_os_str().to_os_string();
    os.push(".vocab");
    std::path::PathBuf::from(os)
}

fn dump_matrix_tsv(
    path: &Path,
    matrix: &ClosedFormMatrix,
    deterministic: bool,
) -> Result<()> {
    write_atomic(path, |w| {
        writeln!(w, "# {}", matrix.provenance())?;
        for line in provenance_lines("closed-form", deterministic) {
            writeln!(w, "# {line}")?;
        }
        for i in 0..matrix.nrows() {
            let mut row = String::new();
            for j in 0..matrix.ncols() {
                if j > 0 {
                    row.push('\t');
                }
                row.push_str(&fmt_g12(matrix.values()[(i, j)]));
            }
            writeln!(w, "{row}")?;
        }
        Ok(())
    })
}

pub fn run_closed_form(args: ClosedFormArgs) -> CliResult<()> {
    check_window(args.window)?;
    check_neg(args.neg)?;
    if args.model != ModelArg::Node2vec && (args.p.is_some() || args.q.is_some()) {
        return Err(usage("--p/--q only apply to --model node2vec"));
    }
    if args.model != ModelArg::Pte
        && (args.ww.is_some()
            || args.dw.is_some()
            || args.lw.is_some()
            || args.alpha.is_some()
            || args.beta.is_some()
            || args.gamma.is_some())
    {
        return Err(usage(
            "--ww/--dw/--lw and --alpha/--beta/--gamma only apply to --model pte",
        ));
    }

    let matrix = match args.model {
        ModelArg::Line | ModelArg::Deepwalk | ModelArg::Node2vec => {
            let input = args
                .input
                .as_ref()
                .ok_or_else(|| usage("this model needs --input <edge list>"))?;
            let graph = load_graph(input, args.isolated)?;
            match args.model {
                ModelArg::Line => {
                    closed_form::line_matrix_capped(&graph, args.neg, args.dense_cap)?
                }
                ModelArg::Deepwalk => closed_form::deepwalk_matrix_capped(
                    &graph,
                    args.window,
                    args.neg,
                    args.dense_cap,
                )?,
                ModelArg::Node2vec => closed_form::node2vec_matrix_capped(
                    &graph,
                    args.p.unwrap_or(1.0),
                    args.q.unwrap_or(1.0),
                    args.window,
                    args.neg,
                    args.state_cap,
                    closed_form::DEFAULT_STATIONARY_TOL,
                    closed_form::DEFAULT_STATIONARY_MAX_ITER,
                )?,
                ModelArg::Pte => unreachable!(),
            }
        }
        ModelArg::Pte => {
            let (ww, dw, lw) = match (&args.ww, &args.dw, &args.lw) {
                (Some(ww), Some(dw), Some(lw)) => (ww, dw, lw),
                _ => return Err(usage("--model pte needs --ww, --dw, and --lw edge lists")),
            };
            if args.input.is_some() {
                return Err(usage("--model pte takes --ww/--dw/--lw, not --input"));
            }
            let ww = load_graph(ww, args.isolated)?;
            let dw = load_bipartite_aligned(open_input(dw)?, ww.tokens())?;
            let lw = load_bipartite_aligned(open_input(lw)?, ww.tokens())?;
            let mut weights = PteWeights::balanced(&ww, &dw, &lw);
            if let Some(a) = args.alpha {
                weights.alpha = a;
            }
            if let Some(b) = args.beta {
                weights.beta = b;
            }
            if let Some(g) = args.gamma {
                weights.gamma = g;
            }
            closed_form::pte_matrix(&ww, &dw, &lw, weights, args.neg)?
        }
    };

    let matrix = if args.log { netmf::shifted_log(&matrix) } else { matrix };
    dump_matrix_tsv(&args.output, &matrix, args.deterministic)?;
    Ok(())
}

pub fn run_simulate(args: SimulateArgs) -> CliResult<()> {
    check_window(args.window)?;
    check_neg(args.neg)?;
    if args.model == SimModelArg::Deepwalk && (args.p.is_some() || args.q.is_some()) {
        return Err(usage("--p/--q only apply to --model node2vec"));
    }
    if args.model == SimModelArg::Node2vec && args.start.is_some() {
        return Err(usage(
            "--start only applies to --model deepwalk; the second-order walk starts \
             from the edge-chain stationary distribution",
        ));
    }
    if args.walks == 0 {
        return Err(usage("--walks must be at least 1"));
    }

    let graph = load_graph(&args.input, args.isolated)?;
    let params = WalkParams {
        walks: args.walks,
        length: args.length,
        window: args.window,
        seed: args.seed,
        start: match args.start.unwrap_or(StartArg::Stationary) {
            StartArg::Stationary => WalkStart::Stationary,
            StartArg::Uniform => WalkStart::Uniform,
        },
    };

    struct ReportData {
        total: u64,
        report: walk::ConvergenceReport,
        summary: String,
    }
    let data = match args.model {
        SimModelArg::Deepwalk => {
            let corpus = walk::deepwalk_corpus(&graph, params)?;
            let report = walk::deepwalk_convergence_report(&corpus, &graph, args.neg)?;
            ReportData {
                total: corpus.total(),
                report,
                summary: format!(
                    "simulate model=deepwalk N={} L={} T={} b={} seed={} start={}",
                    args.walks,
                    args.length,
                    args.window,
                    args.neg,
                    args.seed,
                    match params.start {
                        WalkStart::Stationary => "stationary",
                        WalkStart::Uniform => "uniform",
                    }
                ),
            }
        }
        SimModelArg::Node2vec => {
            let p = args.p.unwrap_or(1.0);
            let q = args.q.unwrap_or(1.0);
            let corpus = walk::node2vec_corpus(&graph, p, q, params)?;
            let report = walk::node2vec_convergence_report(&corpus, &graph, args.neg)?;
            ReportData {
                total: corpus.total(),
                report,
                summary: format!(
                    "simulate model=node2vec p={p} q={q} N={} L={} T={} b={} seed={}",
                    args.walks, args.length, args.window, args.neg, args.seed
                ),
            }
        }
    };
    use netmf_core::walk::PairCorpus as _;

    write_atomic(&args.report, |w| {
        for line in provenance_lines(&data.summary, args.deterministic) {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "metric\toffset\tvalue")?;
        writeln!(w, "corpus_size\t-\t{}", data.total)?;
        for (r, v) in data.report.per_offset_forward.iter().enumerate() {
            writeln!(w, "per_offset_forward_l1\t{}\t{}", r + 1, fmt_g12(*v))?;
        }
        for (r, v) in data.report.per_offset_backward.iter().enumerate() {
            writeln!(w, "per_offset_backward_l1\t{}\t{}", r + 1, fmt_g12(*v))?;
        }
        writeln!(w, "joint_l1\t-\t{}", fmt_g12(data.report.joint_l1))?;
        writeln!(w, "joint_max_abs\t-\t{}", fmt_g12(data.report.joint_max_abs))?;
        writeln!(w, "marginal_l1\t-\t{}", fmt_g12(data.report.marginal_l1))?;
        writeln!(w, "pmi_max_abs\t-\t{}", fmt_g12(data.report.pmi_max_abs))?;
        Ok(())
    })?;
    Ok(())
}

pub fn run_spectrum(args: SpectrumArgs) -> CliResult<()> {
    check_window(args.window)?;
    let graph = load_graph(&args.input, args.isolated)?;
    let n = graph.n();
    let h = args.top.unwrap_or_else(|| n.min(256));
    if h == 0 || h > n {
        return Err(CliError::Core(Error::validation(format!(
            "--top must lie in [1, {n}], got {h}"
        ))));
    }
    let s = graph.normalized_adjacency();
    let pairs = spectral::top_eigenpairs(&s, h, spectral::DEFAULT_EIGEN_TOL, n, args.seed)?;
    let bounds = if n <= spectral::FULL_EIGEN_CAP {
        Some(spectral::verify_bounds(&graph, args.window)?)
    } else {
        None
    };
    if args.plot_data && bounds.is_none() {
        return Err(CliError::Core(Error::capacity(format!(
            "--plot-data needs the dense spectrum (n ≤ {}), got n = {n}",
            spectral::FULL_EIGEN_CAP
        ))));
    }

    write_atomic(&args.output, |w| {
        writeln!(w, "# model=spectrum T={} h={h} n={n}", args.window)?;
        for line in provenance_lines(
            &format!("spectrum T={} h={h} seed={}", args.window, args.seed),
            args.deterministic,
        ) {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "# section=eigenvalues")?;
        writeln!(w, "index\teigenvalue\tfiltered\tresidual")?;
        for (i, (&l, &r)) in pairs
            .eigenvalues()
            .iter()
            .zip(pairs.residuals())
            .enumerate()
        {
            writeln!(
                w,
                "{i}\t{}\t{}\t{}",
                fmt_g12(l),
                fmt_g12(spectral::filter(l, args.window)),
                fmt_g12(r)
            )?;
        }
        if let Some(report) = &bounds {
            writeln!(w, "# section=bounds")?;
            writeln!(w, "# rayleigh_lhs={}", fmt_g12(report.rayleigh_lhs))?;
            writeln!(w, "# rayleigh_rhs={}", fmt_g12(report.rayleigh_rhs))?;
            writeln!(w, "# singular_ok={}", report.singular_ok)?;
            writeln!(w, "# rayleigh_ok={}", report.rayleigh_ok)?;
            writeln!(w, "index\tsingular_value\tbound")?;
            for (i, (s, b)) in report
                .singular_values
                .iter()
                .zip(&report.singular_bounds)
                .enumerate()
            {
                writeln!(w, "{i}\t{}\t{}", fmt_g12(*s), fmt_g12(*b))?;
            }
            if args.plot_data {
                let full = spectral::full_eigenpairs(&s)?;
                let mut filtered = spectral::filtered(full.eigenvalues(), args.window);
                filtered.sort_by(|a, b| b.partial_cmp(a).unwrap());
                writeln!(w, "# section=plot")?;
                writeln!(w, "index\tlambda\tfiltered\tinterior")?;
                for i in 0..n {
                    writeln!(
                        w,
                        "{i}\t{}\t{}\t{}",
                        fmt_g12(full.eigenvalues()[i]),
                        fmt_g12(filtered[i]),
                        fmt_g12(report.interior_eigenvalues[i])
                    )?;
                }
            }
        } else {
            writeln!(
                w,
                "# section=bounds skipped: n = {n} exceeds the dense cap {}",
                spectral::FULL_EIGEN_CAP
            )?;
        }
        Ok(())
    })?;
    Ok(())
}

pub fn run_eval(args: EvalArgs) -> CliResult<()> {
    let mut ratios = Vec::new();
    for part in args.ratios.split(',') {
        let r: f64 = part
            .trim()
            .parse()
            .map_err(|_| usage(format!("bad ratio \"{part}\" in --ratios")))?;
        if !(r > 0.0 && r < 1.0) {
            return Err(usage(format!("ratio {r} must lie in (0, 1)")));
        }
        ratios.push(r);
    }
    if ratios.is_empty() {
        return Err(usage("--ratios must name at least one ratio"));
    }
    if args.repeats == 0 {
        return Err(usage("--repeats must be at least 1"));
    }

    let (tokens, features) = netmf::read_embedding(open_input(&args.embedding)?)?;
    let token_index: std::collections::HashMap<&str, usize> = tokens
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i))
        .collect();
    let pairs = netmf_core::graph::parse_label_pairs(open_input(&args.labels)?)?;
    let labels = LabelSet::from_pairs(
        &pairs,
        |t| token_index.get(t).copied(),
        features.nrows(),
    )?;

    let config = EvalConfig {
        ratios,
        repeats: args.repeats,
        seed: args.seed,
        l2: args.l2,
        tol: args.opt_tol,
        max_iter: 1_000,
    };
    let report = eval::evaluate(&features, &labels, &config)?;
    for l in &report.skipped_labels {
        eprintln!(
            "warning: label \"{}\" had no positive training example in some repeat; skipped there",
            labels.label_tokens()[*l]
        );
    }

    write_atomic(&args.report, |w| {
        for line in provenance_lines(
            &format!(
                "eval repeats={} seed={} l2={} labels={}",
                args.repeats,
                args.seed,
                args.l2,
                labels.n_labels()
            ),
            args.deterministic,
        ) {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "ratio\tmicro_mean\tmicro_std\tmacro_mean\tmacro_std")?;
        for row in &report.rows {
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}",
                fmt_g12(row.ratio),
                fmt_g12(row.micro_mean),
                fmt_g12(row.micro_std),
                fmt_g12(row.macro_mean),
                fmt_g12(row.macro_std)
            )?;
        }
        Ok(())
    })?;
    Ok(())
}
