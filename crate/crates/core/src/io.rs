//! Delimiter-separated inputs and outputs, and scenario configuration files.
//!
//! Tables are tab- or comma-separated (chosen from the header line) with
//! surrounding whitespace ignored. Numbers are written with 6 significant
//! digits and a `.` decimal separator.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::correlation::{pearson_group_correlation, GroupCorrelation, MeanRowCorrelations};
use crate::error::{CastError, Result};
use crate::procedures::{AdjustmentResult, FactorTrace, Method};
use crate::pvalues::{FeatureId, GroupId, GroupedPValueSet, Record};
use crate::simulation::{DataMatrix, SimulationScenario, StudyPoint};
use crate::testing::{Label, PhenotypeVector};

/// `%g`-style rendering with 6 significant digits.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_owned()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CastError + '_ {
    move |e| CastError::io(path, e)
}

fn parse_err(path: &Path, line: usize, column: &str, message: impl Into<String>) -> CastError {
    CastError::Parse { path: path.to_path_buf(), line, column: column.to_owned(), message: message.into() }
}

/// Header, rows and 1-based line numbers of a delimited table.
struct Table {
    path: PathBuf,
    header: Vec<String>,
    rows: Vec<(usize, Vec<String>)>,
}

impl Table {
    fn read(path: &Path) -> Result<Table> {
        let file = File::open(path).map_err(io_err(path))?;
        let mut first = String::new();
        BufReader::new(&file).read_line(&mut first).map_err(io_err(path))?;
        if first.trim().is_empty() {
            return Err(parse_err(path, 1, "", "missing header line"));
        }
        let delimiter = if first.contains('\t') { b'\t' } else { b',' };
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(delimiter)
            .trim(csv::Trim::All)
            .flexible(true)
            .from_path(path)
            .map_err(|e| parse_err(path, 1, "", e.to_string()))?;
        let header: Vec<String> = reader
            .headers()
            .map_err(|e| parse_err(path, 1, "", e.to_string()))?
            .iter()
            .map(str::to_owned)
            .collect();
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line() as usize);
                parse_err(path, line, "", e.to_string())
            })?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            if rec.iter().all(str::is_empty) {
                continue;
            }
            if rec.len() != header.len() {
                return Err(parse_err(
                    path,
                    line,
                    "",
                    format!("expected {} fields, found {}", header.len(), rec.len()),
                ));
            }
            rows.push((line, rec.iter().map(str::to_owned).collect()));
        }
        Ok(Table { path: path.to_path_buf(), header, rows })
    }

    fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| parse_err(&self.path, 1, name, "required column missing"))
    }

    fn number(&self, line: usize, column: &str, raw: &str) -> Result<f64> {
        raw.parse::<f64>().map_err(|_| parse_err(&self.path, line, column, format!("not a number: {raw:?}")))
    }
}

/// Reads a `feature`, `group`, `pvalue` table and validates it.
pub fn read_pvalue_table(path: impl AsRef<Path>) -> Result<GroupedPValueSet<f64>> {
    let t = Table::read(path.as_ref())?;
    let (cf, cg, cp) = (t.column("feature")?, t.column("group")?, t.column("pvalue")?);
    let records = t
        .rows
        .iter()
        .map(|(line, row)| Ok(Record::new(row[cf].clone(), row[cg].clone(), t.number(*line, "pvalue", &row[cp])?)))
        .collect::<Result<Vec<_>>>()?;
    GroupedPValueSet::validate(records)
}

/// Writes a set in the format read by [`read_pvalue_table`].
pub fn write_pvalue_table(set: &GroupedPValueSet<f64>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    let mut body = String::from("feature\tgroup\tpvalue\n");
    for g in set.groups() {
        for &i in &g.members {
            let e = set.entry(i);
            // full precision so the set re-validates identically
            body.push_str(&format!("{}\t{}\t{:e}\n", e.feature, e.group, e.p));
        }
    }
    w.write_all(body.as_bytes()).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

/// Mean row correlations from a `feature`, `rbar` table.
pub fn read_mean_correlations(path: impl AsRef<Path>) -> Result<MeanRowCorrelations<f64>> {
    let t = Table::read(path.as_ref())?;
    let (cf, cr) = (t.column("feature")?, t.column("rbar")?);
    t.rows
        .iter()
        .map(|(line, row)| Ok((FeatureId::new(row[cf].clone()), t.number(*line, "rbar", &row[cr])?)))
        .collect()
}

/// Reads one square correlation matrix: the header names the features, each
/// row starts with its feature id.
pub fn read_correlation_matrix(path: impl AsRef<Path>, group: GroupId) -> Result<GroupCorrelation<f64>> {
    let t = Table::read(path.as_ref())?;
    let order: Vec<FeatureId> = t.header.iter().skip(1).map(|h| FeatureId::new(h.clone())).collect();
    if t.rows.len() != order.len() {
        return Err(parse_err(&t.path, 1, "", format!("{} rows for {} columns", t.rows.len(), order.len())));
    }
    let mut values = vec![0.0; order.len() * order.len()];
    for (i, (line, row)) in t.rows.iter().enumerate() {
        if row[0] != order[i].as_str() {
            return Err(parse_err(&t.path, *line, &row[0], format!("row {} must be feature {}", i + 1, order[i])));
        }
        for (j, raw) in row.iter().skip(1).enumerate() {
            values[i * order.len() + j] = t.number(*line, order[j].as_str(), raw)?;
        }
    }
    GroupCorrelation::new(group, order, values)
}

/// Mean row correlations from a directory holding `<group>.tsv` (or `.csv`)
/// matrices. Groups without a file are left out; the matrix must cover
/// exactly the group's features.
pub fn read_correlation_dir(dir: impl AsRef<Path>, set: &GroupedPValueSet<f64>) -> Result<MeanRowCorrelations<f64>> {
    let dir = dir.as_ref();
    let mut out = MeanRowCorrelations::default();
    for g in set.groups().iter().filter(|g| g.size() > 1) {
        let Some(path) = ["tsv", "csv"].iter().map(|ext| dir.join(format!("{}.{ext}", g.id))).find(|p| p.exists())
        else {
            continue;
        };
        let corr = read_correlation_matrix(&path, g.id.clone())?;
        let expected: HashSet<&FeatureId> = g.members.iter().map(|&i| &set.entry(i).feature).collect();
        let got: HashSet<&FeatureId> = corr.order().iter().collect();
        if expected != got {
            return Err(CastError::InvalidCorrelation {
                group: g.id.to_string(),
                reason: format!("{} does not list exactly the group's features", path.display()),
            });
        }
        out.extend(corr.mean_row_correlation());
    }
    Ok(out)
}

/// Aligned inputs of a data-matrix run.
#[derive(Debug, Clone)]
pub struct MatrixInput {
    pub features: Vec<FeatureId>,
    /// Group of each feature (same order as `features`).
    pub groups: Vec<GroupId>,
    pub subjects: Vec<String>,
    pub data: DataMatrix,
    pub phenotype: PhenotypeVector,
    pub warnings: Vec<String>,
}

impl MatrixInput {
    pub fn pvalue_set(&self, pvalues: &[f64]) -> Result<GroupedPValueSet<f64>> {
        GroupedPValueSet::validate(
            self.features
                .iter()
                .zip(&self.groups)
                .zip(pvalues)
                .map(|((f, g), &p)| Record::new(f.as_str(), g.as_str(), p)),
        )
    }

    /// Pearson mean row correlations for every group of `set` whose features
    /// are all rows of the matrix.
    pub fn mean_correlations(&self, set: &GroupedPValueSet<f64>) -> Result<MeanRowCorrelations<f64>> {
        let index: HashMap<&FeatureId, usize> = self.features.iter().enumerate().map(|(i, f)| (f, i)).collect();
        let parts: Vec<Result<Option<MeanRowCorrelations<f64>>>> = set
            .groups()
            .par_iter()
            .map(|g| {
                let rows: Option<Vec<usize>> = g.members.iter().map(|&i| index.get(&set.entry(i).feature).copied()).collect();
                let Some(rows) = rows else { return Ok(None) };
                let data: Vec<&[f64]> = rows.iter().map(|&r| self.data.row(r)).collect();
                let order = rows.iter().map(|&r| self.features[r].clone()).collect();
                let est = pearson_group_correlation(g.id.clone(), order, &data)?;
                Ok(Some(est.correlation.mean_row_correlation()))
            })
            .collect();
        let mut out = MeanRowCorrelations::default();
        for p in parts {
            if let Some(m) = p? {
                out.extend(m);
            }
        }
        Ok(out)
    }
}

/// Reads a feature-by-subject matrix, a `subject`, `status` phenotype table
/// and a `feature`, `group` annotation table. Features missing from the
/// annotation become singleton groups named after themselves.
pub fn read_data_matrix(
    matrix: impl AsRef<Path>,
    phenotype: impl AsRef<Path>,
    annotation: impl AsRef<Path>,
) -> Result<MatrixInput> {
    let mut warnings = Vec::new();

    let ph = Table::read(phenotype.as_ref())?;
    let (cs, cl) = (ph.column("subject")?, ph.column("status")?);
    let mut labels = HashMap::new();
    for (line, row) in &ph.rows {
        let label: Label = row[cl].parse().map_err(|m: String| parse_err(&ph.path, *line, "status", m))?;
        labels.insert(row[cs].clone(), label);
    }

    let an = Table::read(annotation.as_ref())?;
    let (af, ag) = (an.column("feature")?, an.column("group")?);
    let annot: HashMap<String, String> = an.rows.iter().map(|(_, r)| (r[af].clone(), r[ag].clone())).collect();

    let mx = Table::read(matrix.as_ref())?;
    let subjects: Vec<String> = mx.header.iter().skip(1).cloned().collect();
    let mut phen = Vec::with_capacity(subjects.len());
    for s in &subjects {
        match labels.get(s) {
            Some(&l) => phen.push(l),
            None => return Err(CastError::SubjectMismatch(format!("subject {s} has no phenotype"))),
        }
    }
    if labels.len() > subjects.len() {
        let extra = labels.len() - subjects.len();
        warnings.push(format!("{extra} phenotype subject(s) not in the matrix were ignored"));
    }

    let n = subjects.len();
    let mut features = Vec::with_capacity(mx.rows.len());
    let mut groups = Vec::with_capacity(mx.rows.len());
    let mut values = Vec::with_capacity(mx.rows.len() * n);
    for (line, row) in &mx.rows {
        let id = &row[0];
        for (k, raw) in row.iter().skip(1).enumerate() {
            values.push(mx.number(*line, &subjects[k], raw)?);
        }
        let group = match annot.get(id) {
            Some(g) => g.clone(),
            None => {
                let msg = format!("feature {id} is not annotated; placed in its own group");
                log::warn!("{msg}");
                warnings.push(msg);
                id.clone()
            }
        };
        features.push(FeatureId::new(id.clone()));
        groups.push(GroupId::new(group));
    }
    Ok(MatrixInput {
        data: DataMatrix { features: features.len(), subjects: n, values },
        features,
        groups,
        subjects,
        phenotype: PhenotypeVector::new(phen),
        warnings,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    Ok(BufWriter::new(File::create(path).map_err(io_err(path))?))
}

/// `out.tsv` -> `out.groups.tsv`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.groups.{}", ext.to_string_lossy()),
        None => format!("{stem}.groups"),
    };
    path.with_file_name(name)
}

fn factor_cell(f: &FactorTrace<f64>) -> String {
    match f {
        FactorTrace::Scalar(c) => format_number(*c),
        FactorTrace::PerRank(v) => v.iter().map(|&c| format_number(c)).collect::<Vec<_>>().join(";"),
    }
}

/// Writes per-feature results and the per-group sidecar.
pub fn write_adjustment(result: &AdjustmentResult<f64>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut rows: Vec<_> = result.features.iter().collect();
    rows.sort_by(|a, b| a.adjusted.total_cmp(&b.adjusted).then_with(|| a.feature.cmp(&b.feature)));
    let mut body = String::from("feature\tgroup\trank\tp\tadjusted_p\trejected\n");
    for f in rows {
        body.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            f.feature,
            f.group,
            f.rank,
            format_number(f.p),
            format_number(f.adjusted),
            f.rejected
        ));
    }
    let mut w = create(path)?;
    w.write_all(body.as_bytes()).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))?;

    let side = sidecar_path(path);
    let mut body = String::from("group\tM_g\tpi0\tA_B\tC\tfallback_used\n");
    for g in &result.groups {
        body.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            g.group,
            g.size,
            format_number(g.pi0),
            format_number(g.between_factor),
            factor_cell(&g.factor),
            g.fallback_used
        ));
    }
    let mut w = create(&side)?;
    w.write_all(body.as_bytes()).map_err(io_err(&side))?;
    w.flush().map_err(io_err(&side))
}

/// One row of an adjustment output file.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjustmentRow {
    pub feature: String,
    pub group: String,
    pub rank: usize,
    pub p: f64,
    pub adjusted_p: f64,
    pub rejected: bool,
}

pub fn read_adjustment(path: impl AsRef<Path>) -> Result<Vec<AdjustmentRow>> {
    let t = Table::read(path.as_ref())?;
    let cols = ["feature", "group", "rank", "p", "adjusted_p", "rejected"].map(|c| t.column(c));
    let [cf, cg, cr, cp, ca, cx] = cols;
    let (cf, cg, cr, cp, ca, cx) = (cf?, cg?, cr?, cp?, ca?, cx?);
    t.rows
        .iter()
        .map(|(line, r)| {
            Ok(AdjustmentRow {
                feature: r[cf].clone(),
                group: r[cg].clone(),
                rank: r[cr].parse().map_err(|_| parse_err(&t.path, *line, "rank", "not an integer"))?,
                p: t.number(*line, "p", &r[cp])?,
                adjusted_p: t.number(*line, "adjusted_p", &r[ca])?,
                rejected: r[cx].parse().map_err(|_| parse_err(&t.path, *line, "rejected", "not a boolean"))?,
            })
        })
        .collect()
}

/// Group diagnostics row of the sidecar file.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupRow {
    pub group: String,
    pub size: usize,
    pub pi0: f64,
    pub between_factor: f64,
    pub factor: Vec<f64>,
    pub fallback_used: bool,
}

pub fn read_group_sidecar(path: impl AsRef<Path>) -> Result<Vec<GroupRow>> {
    let t = Table::read(path.as_ref())?;
    let (cg, cm, cp, ca, cc, cb) =
        (t.column("group")?, t.column("M_g")?, t.column("pi0")?, t.column("A_B")?, t.column("C")?, t.column("fallback_used")?);
    t.rows
        .iter()
        .map(|(line, r)| {
            Ok(GroupRow {
                group: r[cg].clone(),
                size: r[cm].parse().map_err(|_| parse_err(&t.path, *line, "M_g", "not an integer"))?,
                pi0: t.number(*line, "pi0", &r[cp])?,
                between_factor: t.number(*line, "A_B", &r[ca])?,
                factor: r[cc].split(';').map(|x| t.number(*line, "C", x)).collect::<Result<_>>()?,
                fallback_used: r[cb].parse().map_err(|_| parse_err(&t.path, *line, "fallback_used", "not a boolean"))?,
            })
        })
        .collect()
}

/// One point of a threshold curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdRow {
    pub method: Method,
    pub rbar: f64,
    pub rank: usize,
    pub threshold: f64,
}

pub fn write_thresholds(rows: &[ThresholdRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut body = String::from("method\trbar\trank\tthreshold\n");
    for r in rows {
        body.push_str(&format!("{}\t{}\t{}\t{}\n", r.method, format_number(r.rbar), r.rank, format_number(r.threshold)));
    }
    let mut w = create(path)?;
    w.write_all(body.as_bytes()).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

pub fn read_thresholds(path: impl AsRef<Path>) -> Result<Vec<ThresholdRow>> {
    let t = Table::read(path.as_ref())?;
    let (cm, cr, cj, ct) = (t.column("method")?, t.column("rbar")?, t.column("rank")?, t.column("threshold")?);
    t.rows
        .iter()
        .map(|(line, r)| {
            Ok(ThresholdRow {
                method: r[cm].parse().map_err(|m: String| parse_err(&t.path, *line, "method", m))?,
                rbar: t.number(*line, "rbar", &r[cr])?,
                rank: r[cj].parse().map_err(|_| parse_err(&t.path, *line, "rank", "not an integer"))?,
                threshold: t.number(*line, "threshold", &r[ct])?,
            })
        })
        .collect()
}

const LIST_KEYS: [&str; 2] = ["methods", "size_support"];

/// Parses a flat TOML scenario file. Keys are [`SimulationScenario`] field
/// names; a list value on any scalar key makes it a grid axis and the grid
/// is the Cartesian product of all axes (keys in lexical order, last key
/// varying fastest).
pub fn parse_scenario_grid(text: &str) -> Result<Vec<SimulationScenario>> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| CastError::Config(e.message().to_owned()))?;
    let mut points: Vec<toml::Table> = vec![toml::Table::new()];
    for (key, value) in &table {
        let axis: Vec<toml::Value> = match value {
            toml::Value::Array(items) if !LIST_KEYS.contains(&key.as_str()) => {
                if items.is_empty() {
                    return Err(CastError::Config(format!("grid axis {key} is empty")));
                }
                items.clone()
            }
            toml::Value::Table(_) => return Err(CastError::Config(format!("nested table {key} not allowed"))),
            v => vec![v.clone()],
        };
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |v| {
                    let mut q = p.clone();
                    q.insert(key.clone(), v.clone());
                    q
                })
            })
            .collect();
    }
    points
        .into_iter()
        .map(|p| {
            let s: SimulationScenario =
                toml::Value::Table(p).try_into().map_err(|e: toml::de::Error| CastError::Config(e.message().to_owned()))?;
            s.validate()?;
            Ok(s)
        })
        .collect()
}

pub fn read_scenario_grid(path: impl AsRef<Path>) -> Result<Vec<SimulationScenario>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_scenario_grid(&text)
}

/// Writes `summary.tsv`, `replicates.tsv`, `table.txt` and one
/// `point_<k>.toml` per grid point into `dir`.
pub fn write_study(points: &[StudyPoint], dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(io_err(dir))?;

    let mut summary = String::from(
        "point\tsubjects\tcase_fraction\tgroups\tfeatures\teffect_size\tnon_null_fraction\twithin_pair_prob\t\
         cross_pair_prob\tcoupling_prob\tmethod\treplicates\tr_mean\tr_sd\tfdr_mean\tfdr_sd\ttpr_mean\ttpr_sd\tany_rejection\n",
    );
    let mut reps = String::from("point\treplicate\tmethod\tnon_nulls\tR\tV\tTP\n");
    let mut table = String::new();
    for (k, pt) in points.iter().enumerate() {
        let s = &pt.scenario;
        for m in &pt.summary.methods {
            summary.push_str(&format!(
                "{k}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                s.subjects,
                format_number(s.case_fraction),
                s.groups,
                s.features,
                format_number(s.effect_size),
                format_number(s.non_null_fraction),
                format_number(s.within_pair_prob),
                format_number(s.cross_pair_prob),
                format_number(s.coupling_prob),
                m.method,
                m.replicates,
                format_number(m.rejections.mean),
                format_number(m.rejections.sd),
                format_number(m.fdr.mean),
                format_number(m.fdr.sd),
                format_number(m.tpr.mean),
                format_number(m.tpr.sd),
                format_number(m.any_rejection),
            ));
        }
        for (i, r) in pt.replicates.iter().enumerate() {
            for (m, c) in &r.counts {
                reps.push_str(&format!(
                    "{k}\t{i}\t{m}\t{}\t{}\t{}\t{}\n",
                    r.non_nulls, c.rejections, c.false_rejections, c.true_rejections
                ));
            }
        }
        table.push_str(&table_block(k, pt));
        let toml = toml::to_string(s).map_err(|e| CastError::Config(e.to_string()))?;
        let p = dir.join(format!("point_{k}.toml"));
        fs::write(&p, toml).map_err(io_err(&p))?;
    }
    for (name, body) in [("summary.tsv", summary), ("replicates.tsv", reps), ("table.txt", table)] {
        let p = dir.join(name);
        fs::write(&p, body).map_err(io_err(&p))?;
    }
    Ok(())
}

/// Methods as column blocks of (R, FDR, TPR), SDs in parentheses below.
fn table_block(k: usize, pt: &StudyPoint) -> String {
    let s = &pt.scenario;
    let mut out = format!(
        "point {k}: gamma_D={} zeta={} upsilon={} G={} M={} replicates={}\n",
        format_number(s.case_fraction),
        format_number(s.effect_size),
        format_number(s.coupling_prob),
        s.groups,
        s.features,
        pt.replicates.len()
    );
    let cell = |x: f64| format!("{x:>8.3}");
    let paren = |x: f64| format!("{:>8}", format!("({x:.3})"));
    let mut head = String::new();
    let mut sub = String::new();
    let mut means = String::new();
    let mut sds = String::new();
    for m in &pt.summary.methods {
        head.push_str(&format!("| {:^26} ", m.method.name().to_uppercase()));
        sub.push_str(&format!("| {:>8} {:>8} {:>8} ", "R", "FDR", "TPR"));
        means.push_str(&format!("| {} {} {} ", cell(m.rejections.mean), cell(m.fdr.mean), cell(m.tpr.mean)));
        sds.push_str(&format!("| {} {} {} ", paren(m.rejections.sd), paren(m.fdr.sd), paren(m.tpr.sd)));
    }
    for line in [head, sub, means, sds] {
        out.push_str(&line);
        out.push_str("|\n");
    }
    out.push('\n');
    out
}

/// Header and rows of any table written by this module.
pub fn read_table(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let t = Table::read(path.as_ref())?;
    Ok((t.header, t.rows.into_iter().map(|(_, r)| r).collect()))
}

/// Summary rows keyed by (point, method) with their numeric columns.
pub fn read_summary(path: impl AsRef<Path>) -> Result<BTreeMap<(usize, String), BTreeMap<String, f64>>> {
    let t = Table::read(path.as_ref())?;
    let (cp, cm) = (t.column("point")?, t.column("method")?);
    let mut out = BTreeMap::new();
    for (line, r) in &t.rows {
        let point = r[cp].parse().map_err(|_| parse_err(&t.path, *line, "point", "not an integer"))?;
        let mut values = BTreeMap::new();
        for (h, v) in t.header.iter().zip(r) {
            if h != "method" && h != "point" {
                values.insert(h.clone(), t.number(*line, h, v)?);
            }
        }
        out.insert((point, r[cm].clone()), values);
    }
    Ok(out)
}
