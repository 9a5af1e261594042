//! End-to-end runs of the binary: each build command against its reference
//! input, query ranking and duplicate folding, the DOT and stats reports,
//! and the exit-code contract (0 success, 2 invalid graph, 3 input error,
//! 4 budget exhausted).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use datagraph::{DataGraph, DataGraphBuilder, EdgeRole, GraphNode, Orientation, WeightPolicy};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_datagraph"))
}

fn core_fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(rel)
}

/// A fresh per-test directory under the system temp dir.
fn scratch(test: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("datagraph-cli-{}-{test}", std::process::id()));
    if dir.exists() {
        fs::remove_dir_all(&dir).unwrap();
    }
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("process exit code")
}

/// Builds the reference relational graph into `dir/graph.json` and returns
/// the path.
fn mondial_graph(dir: &Path) -> PathBuf {
    let out = dir.join("graph.json");
    let output = bin()
        .arg("build-rdb")
        .arg("--schema")
        .arg(core_fixture("mondial_rdb/schema.json"))
        .arg("--data")
        .arg(core_fixture("mondial_rdb"))
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(code(&output), 0, "build failed: {}", stderr_of(&output));
    out
}

/// Two papers linked by a `cite` connector one way and a `cited_by`
/// connector the other, written as a graph document.
fn citation_graph(dir: &Path) -> PathBuf {
    let mut builder = DataGraphBuilder::new(WeightPolicy::default());
    builder.add_node(GraphNode::object("paper:a", "paper").with_name("Paper A")).unwrap();
    builder.add_node(GraphNode::object("paper:b", "paper").with_name("Paper B")).unwrap();
    builder.add_node(GraphNode::connector("cite:1", "cite")).unwrap();
    builder.add_node(GraphNode::connector("cited:1", "cited_by")).unwrap();
    builder.add_edge("paper:a", "cite:1", Orientation::Original, EdgeRole::Reference);
    builder.add_edge("cite:1", "paper:b", Orientation::Original, EdgeRole::Reference);
    builder.add_edge("paper:b", "cited:1", Orientation::Original, EdgeRole::Reference);
    builder.add_edge("cited:1", "paper:a", Orientation::Original, EdgeRole::Reference);
    let path = dir.join("citations.json");
    fs::write(&path, builder.build().to_json()).unwrap();
    path
}

#[test]
fn build_rdb_reports_the_graph_shape_and_relation_cases() {
    let dir = scratch("build-rdb");
    let out = dir.join("graph.json");
    let output = bin()
        .arg("build-rdb")
        .arg("--schema")
        .arg(core_fixture("mondial_rdb/schema.json"))
        .arg("--data")
        .arg(core_fixture("mondial_rdb"))
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(code(&output), 0, "{}", stderr_of(&output));
    let err = stderr_of(&output);
    assert!(
        err.contains("nodes: 7 (objects 5, connectors 2); edges: 12 (original 6, opposite 6)"),
        "summary missing: {err}"
    );
    assert!(
        err.contains("cases: confluence=relationship country=entity economy=auxiliary province=weak-entity river=entity"),
        "case tally missing: {err}"
    );
    let graph = DataGraph::from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!((graph.node_count(), graph.edge_count()), (7, 12));

    // The JSON row set is an alternative to the CSV directory.
    let output = bin()
        .arg("build-rdb")
        .arg("--schema")
        .arg(core_fixture("mondial_rdb/schema.json"))
        .arg("--data")
        .arg(core_fixture("mondial_rdb/rows.json"))
        .output()
        .unwrap();
    assert_eq!(code(&output), 0);
    let from_rows = DataGraph::from_json(&stdout_of(&output)).unwrap();
    assert!(datagraph::graph::isomorphic(&graph, &from_rows));
}

#[test]
fn build_rdb_dangling_references_fail_unless_skipped() {
    let dir = scratch("rdb-dangling");
    let schema = dir.join("schema.json");
    let rows = dir.join("rows.json");
    fs::write(
        &schema,
        r#"{ "relations": [
            { "name": "author", "attributes": ["aid", "name"], "primary_key": ["aid"] },
            { "name": "book", "attributes": ["bid", "title", "author"], "primary_key": ["bid"],
              "foreign_keys": [{ "attrs": ["author"], "target": "author" }] }
        ]}"#,
    )
    .unwrap();
    fs::write(
        &rows,
        r#"{ "author": [{ "aid": "a1", "name": "Knuth" }],
             "book": [{ "bid": "b1", "title": "Fascicles", "author": "ghost" }] }"#,
    )
    .unwrap();

    let output = bin()
        .arg("build-rdb")
        .args(["--schema".as_ref(), schema.as_os_str(), "--data".as_ref(), rows.as_os_str()])
        .output()
        .unwrap();
    assert_eq!(code(&output), 3, "{}", stderr_of(&output));
    assert!(stderr_of(&output).starts_with("error:"));

    let output = bin()
        .arg("build-rdb")
        .args(["--schema".as_ref(), schema.as_os_str(), "--data".as_ref(), rows.as_os_str()])
        .args(["--dangling", "skip"])
        .output()
        .unwrap();
    assert_eq!(code(&output), 0, "{}", stderr_of(&output));
    assert!(stderr_of(&output).contains("warnings: 1"));
}

#[test]
fn build_xml_reports_scanned_significance_and_honors_overrides() {
    let dir = scratch("build-xml");
    let out = dir.join("graph.json");
    let output = bin()
        .arg("build-xml")
        .arg("--doc")
        .arg(core_fixture("mondial_xml/mondial.xml"))
        .arg("--dtd")
        .arg(core_fixture("mondial_xml/mondial.dtd"))
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(code(&output), 0, "{}", stderr_of(&output));
    let err = stderr_of(&output);
    assert!(
        err.contains("nodes: 6 (objects 5, connectors 1); edges: 9 (original 5, opposite 4)"),
        "summary missing: {err}"
    );
    assert!(err.contains("significance: 1 scanned verdicts need confirmation"), "{err}");
    assert!(err.contains("confluence.province: insignificant (scanned from the document)"), "{err}");
    assert!(err.contains("warnings: 1"), "{err}");

    // Pinning the scanned verdict leaves nothing to confirm and the same
    // graph to build.
    let pinned = dir.join("pinned.json");
    let output = bin()
        .arg("build-xml")
        .arg("--doc")
        .arg(core_fixture("mondial_xml/mondial.xml"))
        .arg("--dtd")
        .arg(core_fixture("mondial_xml/mondial.dtd"))
        .arg("--overrides")
        .arg(core_fixture("mondial_xml/overrides.json"))
        .arg("--out")
        .arg(&pinned)
        .output()
        .unwrap();
    assert_eq!(code(&output), 0, "{}", stderr_of(&output));
    assert!(stderr_of(&output).contains("significance: 0 scanned verdicts need confirmation"));
    let first = DataGraph::from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    let second = DataGraph::from_json(&fs::read_to_string(&pinned).unwrap()).unwrap();
    assert!(datagraph::graph::isomorphic(&first, &second));
}

#[test]
fn build_xml_dangling_references_fail_unless_skipped() {
    let dir = scratch("xml-dangling");
    let dtd = dir.join("items.dtd");
    let doc = dir.join("items.xml");
    fs::write(
        &dtd,
        "<!ELEMENT item (#PCDATA)>\n<!ATTLIST item id ID #REQUIRED see IDREF #IMPLIED>\n",
    )
    .unwrap();
    fs::write(&doc, "<root><item id=\"i1\" see=\"missing\">x</item></root>").unwrap();

    let output = bin()
        .arg("build-xml")
        .args(["--doc".as_ref(), doc.as_os_str(), "--dtd".as_ref(), dtd.as_os_str()])
        .output()
        .unwrap();
    assert_eq!(code(&output), 3, "{}", stderr_of(&output));

    let output = bin()
        .arg("build-xml")
        .args(["--doc".as_ref(), doc.as_os_str(), "--dtd".as_ref(), dtd.as_os_str()])
        .args(["--dangling", "skip"])
        .output()
        .unwrap();
    assert_eq!(code(&output), 0, "{}", stderr_of(&output));
    assert!(stderr_of(&output).contains("warnings:"));
    let graph = DataGraph::from_json(&stdout_of(&output)).unwrap();
    assert_eq!(graph.edge_count(), 0);
}

#[test]
fn build_rdf_folds_chains_and_counts_rejected_lines() {
    let output = bin()
        .arg("build-rdf")
        .arg("--triples")
        .arg(core_fixture("rdf/chain.nt"))
        .output()
        .unwrap();
    assert_eq!(code(&output), 0, "{}", stderr_of(&output));
    assert!(
        stderr_of(&output).contains("nodes: 1 (objects 1, connectors 0); edges: 0 (original 0, opposite 0)"),
        "{}",
        stderr_of(&output)
    );
    let graph = DataGraph::from_json(&stdout_of(&output)).unwrap();
    assert_eq!(graph.node_count(), 1);

    let dir = scratch("rdf-rejects");
    let triples = dir.join("mixed.nt");
    fs::write(
        &triples,
        "<http://g.test/a> <http://g.test/ns#label> \"alpha\" .\nthis is not a triple\n",
    )
    .unwrap();
    let output = bin().arg("build-rdf").arg("--triples").arg(&triples).output().unwrap();
    assert_eq!(code(&output), 0, "{}", stderr_of(&output));
    assert!(stderr_of(&output).contains("rejected lines: 1"), "{}", stderr_of(&output));
}

#[test]
fn query_ranks_answers_and_folds_inverse_connectors() {
    let dir = scratch("query");
    let graph = mondial_graph(&dir);

    let output = bin()
        .arg("query")
        .arg(&graph)
        .args(["--keywords", "France,Saône"])
        .output()
        .unwrap();
    assert_eq!(code(&output), 0, "{}", stderr_of(&output));
    let err = stderr_of(&output);
    let reported: usize = err
        .lines()
        .find_map(|line| line.strip_prefix("answers: "))
        .expect("answer count on stderr")
        .parse()
        .unwrap();
    let answers = stdout_of(&output);
    let lines: Vec<&str> = answers.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    assert_eq!(lines.len(), reported);
    assert!(reported >= 1);
    let first: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(first["rank"], 1);
    assert!(first["nodes"].as_array().unwrap().len() >= 3);
    let ranks: Vec<u64> = lines
        .iter()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["rank"].as_u64().unwrap())
        .collect();
    assert_eq!(ranks, (1..=reported as u64).collect::<Vec<_>>());

    // Citing and cited-by count as two answers until declared inverses.
    let citations = citation_graph(&dir);
    let output = bin()
        .arg("query")
        .arg(&citations)
        .args(["--keywords", "Paper A,Paper B"])
        .output()
        .unwrap();
    assert_eq!(code(&output), 0, "{}", stderr_of(&output));
    assert!(stderr_of(&output).contains("answers: 2"));

    let output = bin()
        .arg("query")
        .arg(&citations)
        .args(["--keywords", "Paper A,Paper B", "--inverse", "cite=cited_by"])
        .output()
        .unwrap();
    assert_eq!(code(&output), 0, "{}", stderr_of(&output));
    assert!(stderr_of(&output).contains("answers: 1"));

    // The config file supplies the same pair when no flag does.
    let config = dir.join("config.json");
    fs::write(&config, r#"{ "inverse_types": { "cite": "cited_by" } }"#).unwrap();
    let output = bin()
        .arg("query")
        .arg(&citations)
        .args(["--keywords", "Paper A,Paper B"])
        .arg("--config")
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(code(&output), 0, "{}", stderr_of(&output));
    assert!(stderr_of(&output).contains("answers: 1"));

    let output = bin()
        .arg("query")
        .arg(&citations)
        .args(["--keywords", "Paper A,Paper B", "--inverse", "cite"])
        .output()
        .unwrap();
    assert_eq!(code(&output), 3);
    assert!(stderr_of(&output).contains("--inverse expects"));
}

#[test]
fn query_exit_codes_distinguish_budget_input_and_validation_failures() {
    let dir = scratch("query-codes");
    let graph = mondial_graph(&dir);

    let output = bin()
        .arg("query")
        .arg(&graph)
        .args(["--keywords", "France,Saône", "--budget", "0"])
        .output()
        .unwrap();
    assert_eq!(code(&output), 4, "{}", stderr_of(&output));
    assert!(stderr_of(&output).starts_with("error:"));

    let output = bin()
        .arg("query")
        .arg(dir.join("no-such-graph.json"))
        .args(["--keywords", "France"])
        .output()
        .unwrap();
    assert_eq!(code(&output), 3);

    // A graph that breaks the invariants is rejected before searching.
    let mut builder = DataGraphBuilder::new(WeightPolicy::default());
    builder.add_node(GraphNode::object("a", "site").with_name("Alpha")).unwrap();
    builder.add_node(GraphNode::object("b", "site").with_name("Beta")).unwrap();
    builder.add_node(GraphNode::connector("c", "pair")).unwrap();
    builder.add_edge("a", "c", Orientation::Original, EdgeRole::Reference);
    builder.add_edge("b", "c", Orientation::Original, EdgeRole::Reference);
    let broken = dir.join("broken.json");
    fs::write(&broken, builder.build().to_json()).unwrap();
    let output = bin().arg("query").arg(&broken).args(["--keywords", "Alpha"]).output().unwrap();
    assert_eq!(code(&output), 2, "{}", stderr_of(&output));
    assert!(stderr_of(&output).contains("violates"));
}

#[test]
fn validate_passes_clean_graphs_and_lists_violations_otherwise() {
    let dir = scratch("validate");
    let graph = mondial_graph(&dir);
    let output = bin().arg("validate").arg(&graph).output().unwrap();
    assert_eq!(code(&output), 0, "{}", stderr_of(&output));
    assert!(stderr_of(&output).contains("graph is valid"));

    let mut builder = DataGraphBuilder::new(WeightPolicy::default());
    builder.add_node(GraphNode::object("a", "site")).unwrap();
    builder.add_node(GraphNode::object("b", "site")).unwrap();
    builder.add_node(GraphNode::connector("c", "pair")).unwrap();
    builder.add_edge("a", "c", Orientation::Original, EdgeRole::Reference);
    builder.add_edge("b", "c", Orientation::Original, EdgeRole::Reference);
    let broken = dir.join("broken.json");
    fs::write(&broken, builder.build().to_json()).unwrap();
    let output = bin().arg("validate").arg(&broken).output().unwrap();
    assert_eq!(code(&output), 2);
    assert!(stderr_of(&output).contains("violations: 2"), "{}", stderr_of(&output));
    let report = stdout_of(&output);
    assert!(report.contains("incoming"), "{report}");
    assert!(report.contains("outgoing"), "{report}");
}

#[test]
fn export_dot_output_is_deterministic() {
    let dir = scratch("dot");
    let graph = mondial_graph(&dir);
    let first = bin().arg("export-dot").arg(&graph).output().unwrap();
    assert_eq!(code(&first), 0, "{}", stderr_of(&first));
    let second = bin().arg("export-dot").arg(&graph).output().unwrap();
    assert_eq!(first.stdout, second.stdout);
    let dot = stdout_of(&first);
    assert!(dot.starts_with("digraph"), "{dot}");
    assert!(dot.contains("France"), "{dot}");
    assert!(!dot.contains("gdp"));

    let with_properties = bin().arg("export-dot").arg(&graph).arg("--properties").output().unwrap();
    assert_eq!(code(&with_properties), 0);
    assert!(stdout_of(&with_properties).contains("gdp"));
}

#[test]
fn stats_summarizes_nodes_edges_roles_and_degrees() {
    let dir = scratch("stats");
    let graph = mondial_graph(&dir);
    let output = bin().arg("stats").arg(&graph).output().unwrap();
    assert_eq!(code(&output), 0, "{}", stderr_of(&output));
    let report = stdout_of(&output);
    assert!(
        report.contains("nodes: 7 (objects 5, connectors 2); edges: 12 (original 6, opposite 6)"),
        "{report}"
    );
    assert!(report.contains("roles: foreign_key 12"), "{report}");
    assert!(report.contains("out-degree:"), "{report}");
    assert!(report.contains("in-degree:"), "{report}");
}
