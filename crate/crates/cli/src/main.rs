//! Command-line front end: build data graphs from relational, XML, or
//! triple inputs, then validate, inspect, export, and query them.
//!
//! Artifacts (graph documents, DOT, query results, violation reports) go
//! to `--out` or standard output; summaries and warnings go to standard
//! error, so pipelines stay clean. Exit codes: 0 success, 2 validation
//! failure, 3 input error, 4 search budget exhausted (clap itself exits 2
//! on usage errors).

mod config;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use datagraph::graph::{validate, DotOptions, WeightPolicy};
use datagraph::naming::NamePreference;
use datagraph::rdb::{self, RdbConfig, RelationCase, RelationalDatabase};
use datagraph::rdf::{fold_triples, parse_ntriples, RdfConfig};
use datagraph::search::{
    answer_to_json, enumerate_answers_with_budget, DedupConfig, Query, SearchError,
    DEFAULT_SEARCH_BUDGET,
};
use datagraph::xml::{
    self, classify_element_types, parse_document, parse_dtd, parse_overrides,
    ref_attr_significance, XmlConfig,
};
use datagraph::{DanglingPolicy, DataGraph, NodeKind, Orientation};

use config::{ConfigFile, DanglingChoice, DedupChoice};

const EXIT_VALIDATION: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_BUDGET: u8 = 4;

/// A command failure carrying its exit code; the message prints to stderr.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }

    fn validation(message: impl Into<String>) -> Self {
        Failure { code: EXIT_VALIDATION, message: message.into() }
    }

    fn budget(message: impl Into<String>) -> Self {
        Failure { code: EXIT_BUDGET, message: message.into() }
    }
}

#[derive(Parser)]
#[command(name = "datagraph", version, about = "Build and query data graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a graph from a relational schema and its rows
    BuildRdb {
        /// Schema descriptor (JSON)
        #[arg(long)]
        schema: PathBuf,
        /// Directory of `<relation>.csv` files, or one JSON rows file
        #[arg(long)]
        data: PathBuf,
        /// Where to write the graph document (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        build: BuildFlags,
    },
    /// Build a graph from an XML document and its DTD
    BuildXml {
        /// The XML document
        #[arg(long)]
        doc: PathBuf,
        /// Its document type definition
        #[arg(long)]
        dtd: PathBuf,
        /// Significance overrides for reference attributes (JSON)
        #[arg(long)]
        overrides: Option<PathBuf>,
        /// Where to write the graph document (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        build: BuildFlags,
    },
    /// Build a graph from a file of triples
    BuildRdf {
        /// N-Triples-style input, one triple per line
        #[arg(long)]
        triples: PathBuf,
        /// Where to write the graph document (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        build: BuildFlags,
    },
    /// Search a graph and print ranked answers as JSON lines
    Query {
        /// Graph document to search
        graph: PathBuf,
        /// Keywords, comma separated
        #[arg(short, long, value_delimiter = ',', required = true)]
        keywords: Vec<String>,
        /// Maximum number of answers
        #[arg(long, default_value_t = 10)]
        top: usize,
        /// What makes two answers duplicates
        #[arg(long, value_enum)]
        dedup: Option<DedupChoice>,
        /// Inverse connector-type pair as `a=b`; repeatable
        #[arg(long = "inverse", value_name = "A=B")]
        inverse: Vec<String>,
        /// Abort after exploring this many candidate trees
        #[arg(long)]
        budget: Option<usize>,
        /// Optional config file for dedup defaults
        #[arg(long)]
        config: Option<PathBuf>,
        /// Where to write the answers (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a graph document as Graphviz DOT
    ExportDot {
        graph: PathBuf,
        /// Include property trees in node labels
        #[arg(long)]
        properties: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a graph document against the structural invariants
    Validate { graph: PathBuf },
    /// Print node, edge, and degree statistics for a graph document
    Stats { graph: PathBuf },
}

/// Build-time settings shared by the three build commands; every flag
/// overrides its config-file counterpart.
#[derive(Args)]
struct BuildFlags {
    /// Optional config file (JSON)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Weight of original edges
    #[arg(long)]
    original_weight: Option<f64>,
    /// Weight of opposite edges
    #[arg(long)]
    opposite_weight: Option<f64>,
    /// Name nameless relationship objects after what they reference
    #[arg(long, value_name = "BOOL")]
    synthesize_names: Option<bool>,
    /// What to do when a reference points at nothing
    #[arg(long, value_enum)]
    dangling: Option<DanglingChoice>,
}

impl BuildFlags {
    fn weight_policy(&self, file: &ConfigFile) -> Result<WeightPolicy, Failure> {
        let original = self.original_weight.or(file.original_weight).unwrap_or(1.0);
        let opposite = self.opposite_weight.or(file.opposite_weight).unwrap_or(2.0);
        WeightPolicy::new(original, opposite)
            .map_err(|err| Failure::input(format!("bad weight settings: {err}")))
    }

    fn name_preference(&self, file: &ConfigFile) -> NamePreference {
        match &file.name_attributes {
            Some(names) => NamePreference::new(names),
            None => NamePreference::default(),
        }
    }

    fn dangling(&self, file: &ConfigFile) -> DanglingPolicy {
        match self.dangling.or(file.dangling) {
            Some(DanglingChoice::Skip) => DanglingPolicy::Skip,
            Some(DanglingChoice::Fail) | None => DanglingPolicy::Fail,
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Failure> {
    match command {
        Command::BuildRdb { schema, data, out, build } => build_rdb(&schema, &data, out.as_deref(), &build),
        Command::BuildXml { doc, dtd, overrides, out, build } => {
            build_xml(&doc, &dtd, overrides.as_deref(), out.as_deref(), &build)
        }
        Command::BuildRdf { triples, out, build } => build_rdf(&triples, out.as_deref(), &build),
        Command::Query { graph, keywords, top, dedup, inverse, budget, config, out } => {
            query(&graph, &keywords, top, dedup, &inverse, budget, config.as_deref(), out.as_deref())
        }
        Command::ExportDot { graph, properties, out } => export_dot(&graph, properties, out.as_deref()),
        Command::Validate { graph } => validate_cmd(&graph),
        Command::Stats { graph } => stats(&graph),
    }
}

fn build_rdb(
    schema_path: &Path,
    data: &Path,
    out: Option<&Path>,
    flags: &BuildFlags,
) -> Result<ExitCode, Failure> {
    let file = ConfigFile::load(flags.config.as_deref())?;
    let config = RdbConfig {
        weight_policy: flags.weight_policy(&file)?,
        name_preference: flags.name_preference(&file),
        synthesize_names: flags.synthesize_names.or(file.synthesize_names).unwrap_or(false),
        dangling: flags.dangling(&file),
    };

    let schema = rdb::load_schema(schema_path)
        .map_err(|err| Failure::input(format!("schema `{}`: {err}", schema_path.display())))?;
    let rows = if data.is_dir() {
        rdb::load_rows_csv_dir(&schema, data)
    } else {
        rdb::load_rows_json_file(data)
    }
    .map_err(|err| Failure::input(format!("data `{}`: {err}", data.display())))?;

    let db = RelationalDatabase { schema, rows };
    let built = rdb::build_graph(&db, &config).map_err(|err| Failure::input(err.to_string()))?;

    check_clean(&built.graph)?;
    emit(out, &built.graph.to_json())?;

    eprintln!("{}", graph_summary(&built.graph));
    if !built.case_tally.is_empty() {
        let tally: Vec<String> = built
            .case_tally
            .iter()
            .map(|(relation, case)| format!("{relation}={}", case_name(*case)))
            .collect();
        eprintln!("cases: {}", tally.join(" "));
    }
    report_warnings(&built.warnings);
    Ok(ExitCode::SUCCESS)
}

fn build_xml(
    doc_path: &Path,
    dtd_path: &Path,
    overrides: Option<&Path>,
    out: Option<&Path>,
    flags: &BuildFlags,
) -> Result<ExitCode, Failure> {
    let file = ConfigFile::load(flags.config.as_deref())?;
    let config = XmlConfig {
        weight_policy: flags.weight_policy(&file)?,
        name_preference: flags.name_preference(&file),
        pcdata_attr: file.pcdata_attribute.clone().unwrap_or_else(|| "text".to_string()),
        dangling: flags.dangling(&file),
    };

    let (dtd, mut warnings) = parse_dtd(&read(dtd_path)?)
        .map_err(|err| Failure::input(format!("DTD `{}`: {err}", dtd_path.display())))?;
    let doc = parse_document(&read(doc_path)?)
        .map_err(|err| Failure::input(format!("document `{}`: {err}", doc_path.display())))?;

    let override_list = match overrides.or(file.overrides.as_deref()) {
        Some(path) => parse_overrides(&read(path)?)
            .map_err(|err| Failure::input(format!("overrides `{}`: {err}", path.display())))?,
        None => Vec::new(),
    };

    let (significance, sig_warnings) =
        ref_attr_significance(&dtd, &doc, &override_list, config.dangling)
            .map_err(|err| Failure::input(err.to_string()))?;
    warnings.extend(sig_warnings);

    let classes = classify_element_types(&dtd, &significance);
    let built = xml::build_graph(&doc, &dtd, &classes, &significance, &config)
        .map_err(|err| Failure::input(err.to_string()))?;
    warnings.extend(built.warnings);

    check_clean(&built.graph)?;
    emit(out, &built.graph.to_json())?;

    eprintln!("{}", graph_summary(&built.graph));
    let unconfirmed: Vec<String> = significance
        .iter()
        .filter(|(_, entry)| entry.needs_confirmation)
        .map(|((element, attr), entry)| {
            let verdict = match entry.verdict {
                datagraph::Significance::Significant => "significant",
                datagraph::Significance::Insignificant => "insignificant",
            };
            format!("  - {element}.{attr}: {verdict} (scanned from the document)")
        })
        .collect();
    eprintln!("significance: {} scanned verdicts need confirmation", unconfirmed.len());
    for line in &unconfirmed {
        eprintln!("{line}");
    }
    report_warnings(&warnings);
    Ok(ExitCode::SUCCESS)
}

fn build_rdf(triples_path: &Path, out: Option<&Path>, flags: &BuildFlags) -> Result<ExitCode, Failure> {
    let file = ConfigFile::load(flags.config.as_deref())?;
    let mut config = RdfConfig {
        weight_policy: flags.weight_policy(&file)?,
        ..RdfConfig::default()
    };
    if let Some(predicates) = &file.type_predicates {
        config.type_predicates = predicates.clone();
    }
    if let Some(predicates) = &file.name_predicates {
        config.name_predicates = predicates.clone();
    }

    let (triples, issues) = parse_ntriples(&read(triples_path)?);
    let built = fold_triples(&triples, &config);

    check_clean(&built.graph)?;
    emit(out, &built.graph.to_json())?;

    eprintln!("{}", graph_summary(&built.graph));
    if !issues.is_empty() {
        eprintln!("rejected lines: {}", issues.len());
        for issue in &issues {
            eprintln!("  - {issue}");
        }
    }
    report_warnings(&built.warnings);
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn query(
    graph_path: &Path,
    keywords: &[String],
    top: usize,
    dedup_flag: Option<DedupChoice>,
    inverse: &[String],
    budget: Option<usize>,
    config: Option<&Path>,
    out: Option<&Path>,
) -> Result<ExitCode, Failure> {
    let graph = load_graph(graph_path)?;
    let violations = validate(&graph);
    if !violations.is_empty() {
        for violation in &violations {
            eprintln!("{violation}");
        }
        return Err(Failure::validation(format!(
            "graph `{}` violates {} invariant(s)",
            graph_path.display(),
            violations.len()
        )));
    }

    let file = ConfigFile::load(config)?;
    let mut dedup = match dedup_flag.or(file.dedup) {
        Some(DedupChoice::Edges) => DedupConfig::by_edge_set(),
        Some(DedupChoice::Types) | None => DedupConfig::by_connector_type(),
    };
    // Inverse pairs: flags replace the config map when given.
    if inverse.is_empty() {
        for (a, b) in file.inverse_types.iter().flatten() {
            dedup = dedup.with_inverse(a, b).map_err(|err| Failure::input(err.to_string()))?;
        }
    } else {
        for pair in inverse {
            let Some((a, b)) = pair.split_once('=') else {
                return Err(Failure::input(format!("--inverse expects `a=b`, got `{pair}`")));
            };
            dedup = dedup.with_inverse(a, b).map_err(|err| Failure::input(err.to_string()))?;
        }
    }

    let query = Query::new(keywords).map_err(|err| Failure::input(err.to_string()))?;
    let budget = budget.unwrap_or(DEFAULT_SEARCH_BUDGET);
    let answers = enumerate_answers_with_budget(&graph, &query, top, &dedup, budget)
        .map_err(|err| match err {
            SearchError::GraphTooLarge { .. } => Failure::budget(err.to_string()),
            other => Failure::input(other.to_string()),
        })?;

    let mut lines = String::new();
    for (index, answer) in answers.iter().enumerate() {
        lines.push_str(&answer_to_json(&graph, answer, index + 1).to_string());
        lines.push('\n');
    }
    emit(out, &lines)?;
    eprintln!("answers: {}", answers.len());
    Ok(ExitCode::SUCCESS)
}

fn export_dot(graph_path: &Path, properties: bool, out: Option<&Path>) -> Result<ExitCode, Failure> {
    let graph = load_graph(graph_path)?;
    let dot = graph.to_dot(&DotOptions { show_properties: properties });
    emit(out, &dot)?;
    Ok(ExitCode::SUCCESS)
}

fn validate_cmd(graph_path: &Path) -> Result<ExitCode, Failure> {
    let graph = load_graph(graph_path)?;
    let violations = validate(&graph);
    if violations.is_empty() {
        eprintln!("graph is valid");
        return Ok(ExitCode::SUCCESS);
    }
    for violation in &violations {
        println!("{violation}");
    }
    eprintln!("violations: {}", violations.len());
    Ok(ExitCode::from(EXIT_VALIDATION))
}

fn stats(graph_path: &Path) -> Result<ExitCode, Failure> {
    let graph = load_graph(graph_path)?;
    println!("{}", graph_summary(&graph));

    let mut roles: BTreeMap<String, usize> = BTreeMap::new();
    for edge in graph.edges() {
        *roles.entry(edge.role.to_string()).or_default() += 1;
    }
    let roles: Vec<String> = roles.iter().map(|(role, n)| format!("{role} {n}")).collect();
    println!("roles: {}", if roles.is_empty() { "none".to_string() } else { roles.join(", ") });

    let mut out_degree: BTreeMap<&datagraph::NodeId, usize> = BTreeMap::new();
    let mut in_degree: BTreeMap<&datagraph::NodeId, usize> = BTreeMap::new();
    for edge in graph.edges() {
        *out_degree.entry(&edge.from).or_default() += 1;
        *in_degree.entry(&edge.to).or_default() += 1;
    }
    for (label, degrees) in [("out-degree", out_degree), ("in-degree", in_degree)] {
        let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
        for node in graph.nodes() {
            *histogram.entry(degrees.get(&node.id).copied().unwrap_or(0)).or_default() += 1;
        }
        let cells: Vec<String> = histogram
            .iter()
            .map(|(degree, nodes)| format!("{degree}:{nodes}"))
            .collect();
        println!("{label}: {}", if cells.is_empty() { "none".to_string() } else { cells.join(" ") });
    }
    Ok(ExitCode::SUCCESS)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|err| Failure::input(format!("cannot read `{}`: {err}", path.display())))
}

fn load_graph(path: &Path) -> Result<DataGraph, Failure> {
    DataGraph::from_json(&read(path)?)
        .map_err(|err| Failure::input(format!("graph `{}`: {err}", path.display())))
}

/// Writes the artifact to the file, or to stdout when no path was given.
fn emit(out: Option<&Path>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|err| Failure::input(format!("cannot write `{}`: {err}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Refuses to ship a graph that fails its own invariants.
fn check_clean(graph: &DataGraph) -> Result<(), Failure> {
    let violations = validate(graph);
    if violations.is_empty() {
        return Ok(());
    }
    for violation in &violations {
        eprintln!("{violation}");
    }
    Err(Failure::validation(format!(
        "built graph violates {} invariant(s)",
        violations.len()
    )))
}

fn graph_summary(graph: &DataGraph) -> String {
    let objects = graph.nodes().filter(|n| n.kind == NodeKind::Object).count();
    let connectors = graph.node_count() - objects;
    let original = graph
        .edges()
        .iter()
        .filter(|e| e.orientation == Orientation::Original)
        .count();
    let opposite = graph.edge_count() - original;
    format!(
        "nodes: {} (objects {objects}, connectors {connectors}); edges: {} (original {original}, opposite {opposite})",
        graph.node_count(),
        graph.edge_count(),
    )
}

fn case_name(case: RelationCase) -> &'static str {
    match case {
        RelationCase::Entity => "entity",
        RelationCase::WeakEntity => "weak-entity",
        RelationCase::Relationship => "relationship",
        RelationCase::Auxiliary => "auxiliary",
    }
}

fn report_warnings(warnings: &[String]) {
    if warnings.is_empty() {
        return;
    }
    eprintln!("warnings: {}", warnings.len());
    for warning in warnings {
        eprintln!("  - {warning}");
    }
}
