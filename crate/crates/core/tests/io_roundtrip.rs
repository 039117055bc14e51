use std::fs;

use cast_fdr::correlation::MeanRowCorrelations;
use cast_fdr::io::{
    format_number, read_adjustment, read_correlation_dir, read_data_matrix, read_group_sidecar,
    read_mean_correlations, read_pvalue_table, read_scenario_grid, read_summary, read_table, read_thresholds,
    sidecar_path, write_adjustment, write_pvalue_table, write_study, write_thresholds, ThresholdRow,
};
use cast_fdr::simulation::run_study;
use cast_fdr::{run_adjustment, AdjustmentConfig, CastError, FeatureId, Method, PValueSet, Record};
use proptest::prelude::*;

fn sample_set() -> PValueSet {
    PValueSet::validate([
        Record::new("cg01", "GENE_A", 0.0004),
        Record::new("cg02", "GENE_A", 0.012),
        Record::new("cg03", "GENE_A", 0.31),
        Record::new("cg04", "GENE_B", 0.0009),
        Record::new("cg05", "GENE_B", 0.74),
        Record::new("cg06", "GENE_C", 0.002),
    ])
    .unwrap()
}

fn rbar() -> MeanRowCorrelations<f64> {
    [("cg01", 0.4), ("cg02", 0.35), ("cg03", 0.5), ("cg04", -0.2), ("cg05", -0.2)]
        .into_iter()
        .map(|(f, r)| (FeatureId::from(f), r))
        .collect()
}

#[test]
fn pvalue_table_tab_and_comma() {
    let dir = tempfile::tempdir().unwrap();
    let tsv = dir.path().join("p.tsv");
    fs::write(&tsv, "feature\tgroup\tpvalue\n cg1 \tg1\t0.01\ncg2\tg1\t 0.5\n\ncg3\tg2\t1e-8\n").unwrap();
    let csv = dir.path().join("p.csv");
    fs::write(&csv, "pvalue,feature,group\n0.01,cg1,g1\n0.5,cg2,g1\n1e-8,cg3,g2\n").unwrap();
    let a = read_pvalue_table(&tsv).unwrap();
    let b = read_pvalue_table(&csv).unwrap();
    assert_eq!(a.canonical(), b.canonical());
    assert_eq!(a.group_sizes().into_values().collect::<Vec<_>>(), vec![2, 1]);
}

#[test]
fn pvalue_parse_error_names_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.tsv");
    fs::write(&path, "feature\tgroup\tpvalue\ncg1\tg1\t0.01\ncg2\tg1\tabc\n").unwrap();
    match read_pvalue_table(&path).unwrap_err() {
        CastError::Parse { line, column, .. } => assert_eq!((line, column.as_str()), (3, "pvalue")),
        e => panic!("unexpected {e}"),
    }
    fs::write(&path, "feature\tpvalue\ncg1\t0.01\n").unwrap();
    assert!(matches!(read_pvalue_table(&path), Err(CastError::Parse { ref column, .. }) if column == "group"));
    fs::write(&path, "feature\tgroup\tpvalue\ncg1\tg1\t1.5\ncg1\tg1\t0.2\n").unwrap();
    match read_pvalue_table(&path).unwrap_err() {
        CastError::Validation(v) => assert_eq!(v.len(), 2),
        e => panic!("unexpected {e}"),
    }
}

#[test]
fn pvalue_table_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.tsv");
    let set = sample_set();
    write_pvalue_table(&set, &path).unwrap();
    assert_eq!(read_pvalue_table(&path).unwrap().canonical(), set.canonical());
}

#[test]
fn adjustment_round_trip_and_sort_order() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.tsv");
    let set = sample_set();
    for method in Method::ALL {
        let res = run_adjustment(&set, Some(&rbar()), &AdjustmentConfig::new(method, 0.05)).unwrap();
        write_adjustment(&res, &path).unwrap();
        let rows = read_adjustment(&path).unwrap();
        assert_eq!(rows.len(), set.len());
        assert!(rows.windows(2).all(|w| (w[0].adjusted_p, &w[0].feature) <= (w[1].adjusted_p, &w[1].feature)));
        let by = res.by_feature();
        for r in &rows {
            let f = by[&FeatureId::from(r.feature.as_str())];
            assert_eq!((r.group.as_str(), r.rank, r.rejected), (f.group.as_str(), f.rank, f.rejected));
            assert_eq!(r.p, format_number(f.p).parse::<f64>().unwrap());
            assert_eq!(r.adjusted_p, format_number(f.adjusted).parse::<f64>().unwrap());
        }
        assert_eq!(rows.iter().filter(|r| r.rejected).count(), res.rejections);

        let groups = read_group_sidecar(sidecar_path(&path)).unwrap();
        assert_eq!(groups.len(), 3);
        for (g, d) in groups.iter().zip(&res.groups) {
            assert_eq!((g.group.as_str(), g.size, g.fallback_used), (d.group.as_str(), d.size, d.fallback_used));
            let traced = if method == Method::QCAST { d.size } else { 1 };
            assert_eq!(g.factor.len(), traced);
        }
    }
}

#[test]
fn adjustment_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let set = sample_set();
    let res = run_adjustment(&set, Some(&rbar()), &AdjustmentConfig::new(Method::LCAST, 0.05)).unwrap();
    let (a, b) = (dir.path().join("a.tsv"), dir.path().join("b.tsv"));
    write_adjustment(&res, &a).unwrap();
    let res2 = run_adjustment(&set, Some(&rbar()), &AdjustmentConfig::new(Method::LCAST, 0.05)).unwrap();
    write_adjustment(&res2, &b).unwrap();
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(fs::read(sidecar_path(&a)).unwrap(), fs::read(sidecar_path(&b)).unwrap());
}

#[test]
fn empty_rejection_set_writes_all_false() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("none.tsv");
    let set = PValueSet::validate([Record::new("a", "g", 0.6), Record::new("b", "g", 0.9)]).unwrap();
    let res = run_adjustment(&set, None, &AdjustmentConfig::new(Method::GBH, 0.05)).unwrap();
    write_adjustment(&res, &path).unwrap();
    let rows = read_adjustment(&path).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| !r.rejected));
}

#[test]
fn correlation_directory() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("GENE_A.tsv"),
        "feature\tcg01\tcg02\tcg03\ncg01\t1\t0.5\t0.2\ncg02\t0.5\t1\t0.1\ncg03\t0.2\t0.1\t1\n",
    )
    .unwrap();
    fs::write(dir.path().join("GENE_B.csv"), "feature,cg05,cg04\ncg05,1,-0.3\ncg04,-0.3,1\n").unwrap();
    let m = read_correlation_dir(dir.path(), &sample_set()).unwrap();
    assert_eq!(m.len(), 5);
    assert!((m.get(&"cg01".into()).unwrap() - 1.7 / 3.0).abs() < 1e-15);
    assert!((m.get(&"cg04".into()).unwrap() - 0.35).abs() < 1e-15);

    fs::write(dir.path().join("GENE_B.csv"), "feature,cg05,cg99\ncg05,1,-0.3\ncg99,-0.3,1\n").unwrap();
    assert!(matches!(read_correlation_dir(dir.path(), &sample_set()), Err(CastError::InvalidCorrelation { .. })));
    fs::write(dir.path().join("GENE_B.csv"), "feature,cg05,cg04\ncg05,1,-0.3\ncg04,-0.2,1\n").unwrap();
    assert!(matches!(read_correlation_dir(dir.path(), &sample_set()), Err(CastError::InvalidCorrelation { .. })));
}

#[test]
fn mean_correlation_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rbar.csv");
    fs::write(&path, "feature,rbar\ncg01,0.4\ncg02,-0.25\n").unwrap();
    let m = read_mean_correlations(&path).unwrap();
    assert_eq!(m.get(&"cg02".into()), Some(-0.25));
}

#[test]
fn data_matrix_alignment() {
    let dir = tempfile::tempdir().unwrap();
    let (x, p, a) = (dir.path().join("x.tsv"), dir.path().join("p.tsv"), dir.path().join("a.tsv"));
    fs::write(&x, "feature\ts1\ts2\ts3\ts4\ncg1\t1\t2\t3\t4\ncg2\t2\t1\t4\t3\ncg3\t0.5\t0.1\t0.9\t0.7\n").unwrap();
    fs::write(&p, "subject\tstatus\ns4\tcontrol\ns1\tcase\ns3\tcontrol\ns2\tcase\n").unwrap();
    fs::write(&a, "feature\tgroup\ncg1\tG1\ncg2\tG1\ncg3\tG2\n").unwrap();
    let m = read_data_matrix(&x, &p, &a).unwrap();
    assert_eq!(m.subjects, vec!["s1", "s2", "s3", "s4"]);
    assert_eq!((m.phenotype.cases(), m.phenotype.controls()), (2, 2));
    assert_eq!(m.data.row(1), &[2.0, 1.0, 4.0, 3.0]);
    assert_eq!(m.groups.iter().map(|g| g.as_str()).collect::<Vec<_>>(), ["G1", "G1", "G2"]);
    assert!(m.warnings.is_empty());

    fs::write(&a, "feature\tgroup\ncg1\tG1\ncg2\tG1\n").unwrap();
    let m = read_data_matrix(&x, &p, &a).unwrap();
    assert_eq!(m.groups[2].as_str(), "cg3");
    assert_eq!(m.warnings.len(), 1);

    fs::write(&p, "subject\tstatus\ns1\tcase\ns2\tcase\ns3\tcontrol\n").unwrap();
    assert!(matches!(read_data_matrix(&x, &p, &a), Err(CastError::SubjectMismatch(_))));
}

#[test]
fn thresholds_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.tsv");
    let rows = vec![
        ThresholdRow { method: Method::LCAST, rbar: -0.9, rank: 1, threshold: 0.0016 },
        ThresholdRow { method: Method::GBY, rbar: 0.0, rank: 2, threshold: 1.25e-7 },
    ];
    write_thresholds(&rows, &path).unwrap();
    assert_eq!(read_thresholds(&path).unwrap(), rows);
}

#[test]
fn study_outputs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("grid.toml");
    fs::write(
        &cfg,
        "features = 120\ngroups = 12\nsubjects = 40\nnon_null_fraction = 0.1\nsignal_group_fraction = 0.25\ncoupling_prob = [0.0, 0.5]\nreplicates = 3\n",
    )
    .unwrap();
    let grid = read_scenario_grid(&cfg).unwrap();
    assert_eq!(grid.len(), 2);
    let points = run_study(&grid, 3, 11).unwrap();
    let out = dir.path().join("study");
    write_study(&points, &out).unwrap();

    let summary = read_summary(out.join("summary.tsv")).unwrap();
    assert_eq!(summary.len(), 2 * grid[0].methods.len());
    for (k, p) in points.iter().enumerate() {
        for m in &p.summary.methods {
            let row = &summary[&(k, m.method.to_string())];
            assert_eq!(row["r_mean"], format_number(m.rejections.mean).parse::<f64>().unwrap());
            assert_eq!(row["replicates"], 3.0);
        }
        let dumped = read_scenario_grid(out.join(format!("point_{k}.toml"))).unwrap();
        assert_eq!(dumped, vec![p.scenario.clone()]);
    }
    let (header, rows) = read_table(out.join("replicates.tsv")).unwrap();
    assert_eq!(header, ["point", "replicate", "method", "non_nulls", "R", "V", "TP"]);
    assert_eq!(rows.len(), 2 * 3 * grid[0].methods.len());
    let table = fs::read_to_string(out.join("table.txt")).unwrap();
    assert!(table.contains("LCAST") && table.contains("point 1"));
}

#[test]
fn scenario_grid_rejects_typos() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "featurs = 100\n").unwrap();
    assert!(matches!(read_scenario_grid(&cfg), Err(CastError::Config(_))));
}

proptest! {
    #[test]
    fn arbitrary_sets_round_trip(ps in proptest::collection::vec((0usize..5, 0.0f64..=1.0), 1..40)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.tsv");
        let set = PValueSet::validate(
            ps.iter().enumerate().map(|(i, &(g, p))| Record::new(format!("f{i}"), format!("g{g}"), p)),
        ).unwrap();
        write_pvalue_table(&set, &path).unwrap();
        prop_assert_eq!(read_pvalue_table(&path).unwrap().canonical(), set.canonical());
    }
}
