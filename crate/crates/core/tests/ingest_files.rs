use std::path::{Path, PathBuf};

use netprop::ingest::{
    dataset_stats, mask_labels, preprocess, read_edge_list, read_labels, write_edge_list, write_labels,
    DatasetBundle, Preprocess, RECIPES,
};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn bundle(stem: &str) -> DatasetBundle {
    DatasetBundle::load(
        stem,
        &fixture(&format!("{stem}.edges")),
        &fixture(&format!("{stem}.labels.csv")),
    )
    .unwrap()
}

#[test]
fn two_component_fixture_keeps_larger_component() {
    let raw = bundle("two_components");
    assert_eq!(raw.graph.node_count(), 10);
    let lcc = preprocess(&raw, &Preprocess::default()).unwrap();
    let s = dataset_stats(&lcc);
    assert_eq!((s.nodes, s.edges, s.classes), (7, 9, 2));
    assert_eq!(s.average_degree_2dp(), "2.57");
    let mut names: Vec<&str> = lcc.ids.names().iter().map(String::as_str).collect();
    names.sort_unstable();
    assert_eq!(names, ["1", "2", "3", "4", "5", "6", "7"]);
}

#[test]
fn preprocessing_is_idempotent() {
    for stem in ["two_components", "two_triangles", "pdcbm_small"] {
        for drop_unlabeled in [false, true] {
            let opts = Preprocess { drop_unlabeled, keep_classes: None };
            let once = preprocess(&bundle(stem), &opts).unwrap();
            let twice = preprocess(&once, &opts).unwrap();
            assert_eq!(once.graph, twice.graph, "{stem}");
            assert_eq!(once.labels, twice.labels);
            assert_eq!(once.ids.names(), twice.ids.names());
            assert_eq!(once.classes, twice.classes);
        }
    }
}

#[test]
fn class_whitelist_feeds_label_filter() {
    let raw = bundle("two_components");
    let opts = Preprocess {
        drop_unlabeled: true,
        keep_classes: Some(vec!["right".into()]),
    };
    let out = preprocess(&raw, &opts).unwrap();
    assert_eq!(out.classes, ["right"]);
    assert_eq!(dataset_stats(&out).nodes, 4);
}

#[test]
fn generated_fixture_reads_back() {
    let raw = bundle("pdcbm_small");
    assert_eq!(raw.graph.edge_count(), 1148);
    assert_eq!(raw.labels.num_classes(), 2);
    let observed = read_labels(&fixture("pdcbm_small.observed.csv"), &raw.ids).unwrap();
    assert_eq!(observed.labels.known_count(), 30);
    for i in observed.labels.known() {
        let class = &observed.classes[observed.labels.get(i).unwrap()];
        let truth = &raw.classes[raw.labels.get(i).unwrap()];
        assert_eq!(class, truth);
    }
}

#[test]
fn files_round_trip() {
    let raw = bundle("two_components");
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("g.edges");
    let labels = dir.path().join("g.labels.csv");
    write_edge_list(&raw.graph, Some(&raw.ids), std::fs::File::create(&edges).unwrap()).unwrap();
    write_labels(
        &raw.labels,
        Some(&raw.ids),
        Some(&raw.classes),
        std::fs::File::create(&labels).unwrap(),
    )
    .unwrap();
    let back = DatasetBundle::load("g", &edges, &labels).unwrap();
    assert_eq!(back.graph, raw.graph);
    assert_eq!(back.labels, raw.labels);
    assert_eq!(back.ids.names(), raw.ids.names());
    assert_eq!(back.classes, raw.classes);
}

#[test]
fn malformed_files_report_location() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("bad.edges");
    std::fs::write(&edges, "# header\na b\nc\n").unwrap();
    let err = read_edge_list(&edges).unwrap_err().to_string();
    assert!(err.contains("bad.edges:3"), "{err}");

    let good = dir.path().join("ok.edges");
    std::fs::write(&good, "a b\n").unwrap();
    let list = read_edge_list(&good).unwrap();
    let labels = dir.path().join("l.csv");
    std::fs::write(&labels, "id,label\na,x\nzz,y\n").unwrap();
    let err = read_labels(&labels, &list.ids).unwrap_err().to_string();
    assert!(err.contains("zz"), "{err}");

    assert!(read_edge_list(&dir.path().join("missing.edges")).is_err());
}

#[test]
fn masking_hides_rounded_fraction() {
    let raw = bundle("two_components");
    let full = raw.labels.known_count();
    let masked = mask_labels(&raw.labels, 0.5, 3).unwrap();
    assert_eq!(masked.len(), raw.labels.len());
    // 5 of 10 nodes hidden; node 9 was never labeled
    assert!(masked.known_count() >= full - 5 && masked.known_count() <= full - 4);
    for i in masked.known() {
        assert_eq!(masked.get(i), raw.labels.get(i));
    }
    assert_eq!(mask_labels(&raw.labels, 0.5, 3).unwrap(), masked);
    assert!(mask_labels(&raw.labels, 1.5, 3).is_err());
}

/// Runs only when the raw benchmark files are present in
/// `NETPROP_DATA_DIR`.
#[test]
fn reference_datasets_when_available() {
    let Some(dir) = std::env::var_os("NETPROP_DATA_DIR") else {
        eprintln!("NETPROP_DATA_DIR not set; skipping reference datasets");
        return;
    };
    for recipe in RECIPES {
        match recipe.load(Path::new(&dir)).unwrap() {
            Some(b) => {
                let s = dataset_stats(&b);
                assert!(recipe.matches(&s), "{}: {s}", recipe.name);
            }
            None => eprintln!("{} files not found; skipping", recipe.name),
        }
    }
}

#[test]
fn recipes_skip_missing_files() {
    let dir = tempfile::tempdir().unwrap();
    for recipe in RECIPES {
        assert!(recipe.load(dir.path()).unwrap().is_none());
    }
}
