//! Reading citation data, CCDF tables, plot tables and fit reports.
//!
//! Two input formats are understood:
//!
//! * counts files: one non-negative integer per line, `#` comments;
//! * histogram files: a `k,count` header then strictly increasing rows.
//!
//! Both accept LF or CRLF line endings. Every writer emits LF, uses `.` as the
//! decimal separator and prints floats with 17 significant digits.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;

use crate::analysis::{BurstInterval, BurstPartition};
use crate::estimation::{FitMethod, FitReport, FittedParams, GofSummary, ModelKind};
use crate::histogram::Histogram;
use crate::model::CountDistribution;
use crate::{Error, Result};

/// First line of every report.
pub const REPORT_SCHEMA: &str = "citekinetics-report v1";

/// Input format of a data file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Counts,
    Histogram,
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn parse_err(path: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_owned(),
        line,
        message: message.into(),
    }
}

/// Lines numbered from 1 with a trailing `\r` removed.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
}

/// Strict base-10 `u64`: digits only, no sign, no overflow.
fn parse_u64(s: &str) -> Option<u64> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Parse a counts file held in memory. `origin` names it in errors.
pub fn parse_counts(text: &str, origin: &str) -> Result<Histogram> {
    let mut h = Histogram::new();
    let mut seen = false;
    for (no, raw) in lines(text) {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let k = parse_u64(line)
            .ok_or_else(|| parse_err(origin, no, format!("expected a non-negative integer, found '{line}'")))?;
        h.add(k, 1);
        seen = true;
    }
    if !seen {
        return Err(Error::domain(format!("{origin}: no citation counts found")));
    }
    Ok(h)
}

/// Read a counts file: one citation count per paper. Zeros become the
/// uncited count.
pub fn read_counts(path: impl AsRef<Path>) -> Result<Histogram> {
    let path = path.as_ref();
    parse_counts(&read_text(path)?, &path.display().to_string())
}

/// Parse a histogram file held in memory.
pub fn parse_histogram(text: &str, origin: &str) -> Result<Histogram> {
    let mut rows = lines(text).filter(|(_, l)| !l.trim().is_empty());
    match rows.next() {
        Some((_, l)) if l.trim() == "k,count" => {}
        Some((no, l)) => return Err(parse_err(origin, no, format!("expected header 'k,count', found '{}'", l.trim()))),
        None => return Err(parse_err(origin, 1, "missing header 'k,count'")),
    }
    let mut h = Histogram::new();
    let mut last: Option<u64> = None;
    for (no, raw) in rows {
        let line = raw.trim();
        let (ks, ns) = line
            .split_once(',')
            .ok_or_else(|| parse_err(origin, no, format!("expected 'k,count', found '{line}'")))?;
        let k = parse_u64(ks.trim()).ok_or_else(|| parse_err(origin, no, format!("bad k '{}'", ks.trim())))?;
        let n = parse_u64(ns.trim()).ok_or_else(|| parse_err(origin, no, format!("bad count '{}'", ns.trim())))?;
        if let Some(prev) = last {
            if k == prev {
                return Err(parse_err(origin, no, format!("duplicate k = {k}")));
            }
            if k < prev {
                return Err(parse_err(origin, no, format!("k = {k} after k = {prev}; rows must increase")));
            }
        }
        last = Some(k);
        h.add(k, n);
    }
    Ok(h)
}

pub fn read_histogram(path: impl AsRef<Path>) -> Result<Histogram> {
    let path = path.as_ref();
    parse_histogram(&read_text(path)?, &path.display().to_string())
}

/// Read `path` in the given format.
pub fn read_input(path: impl AsRef<Path>, format: InputFormat) -> Result<Histogram> {
    match format {
        InputFormat::Counts => read_counts(path),
        InputFormat::Histogram => read_histogram(path),
    }
}

pub fn format_histogram(h: &Histogram) -> String {
    let mut s = String::from("k,count\n");
    if h.uncited() > 0 {
        let _ = writeln!(s, "0,{}", h.uncited());
    }
    for (k, n) in h.iter() {
        let _ = writeln!(s, "{k},{n}");
    }
    s
}

pub fn write_histogram(h: &Histogram, path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), &format_histogram(h))
}

/// One count per line, in the given order.
pub fn write_counts(counts: &[u64], path: impl AsRef<Path>) -> Result<()> {
    let mut s = String::with_capacity(counts.len() * 4);
    for k in counts {
        let _ = writeln!(s, "{k}");
    }
    write_text(path.as_ref(), &s)
}

/// Aggregates recomputed on ingest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetSummary {
    pub path: String,
    pub n_papers: u64,
    pub n_cited: u64,
    pub uncited: u64,
    pub total_citations: u64,
    pub max_k: Option<u64>,
}

impl DatasetSummary {
    pub fn of(path: impl Into<String>, h: &Histogram) -> Self {
        Self {
            path: path.into(),
            n_papers: h.n_papers(),
            n_cited: h.n_cited(),
            uncited: h.uncited(),
            total_citations: h.total_citations(),
            max_k: h.max_k(),
        }
    }
}

impl fmt::Display for DatasetSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} papers ({} cited, {} uncited), {} citations, max k {}",
            self.path,
            self.n_papers,
            self.n_cited,
            self.uncited,
            self.total_citations,
            self.max_k.map_or("-".to_string(), |k| k.to_string())
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CcdfRow {
    pub k: u64,
    /// Share of cited papers with more than `k` citations.
    pub empirical: f64,
    pub model: Option<f64>,
}

/// Empirical CCDF at `k = 0` and at every occupied `k`. Between rows the
/// CCDF is constant, see [`CcdfTable::at`].
#[derive(Debug, Clone, PartialEq)]
pub struct CcdfTable {
    pub rows: Vec<CcdfRow>,
}

impl CcdfTable {
    /// Empirical CCDF at any `k`.
    pub fn at(&self, k: u64) -> f64 {
        let i = self.rows.partition_point(|r| r.k <= k);
        self.rows[i - 1].empirical
    }

    /// Fill the model column with `dist.ccdf(k)`.
    pub fn with_model<D: CountDistribution + ?Sized>(mut self, dist: &D) -> Self {
        for r in &mut self.rows {
            r.model = Some(dist.ccdf(r.k));
        }
        self
    }

    pub fn to_plot_table(&self) -> PlotTable {
        let with_model = self.rows.iter().any(|r| r.model.is_some());
        let mut cols = vec!["k".to_string(), "ccdf_empirical".to_string()];
        if with_model {
            cols.push("ccdf_model".to_string());
        }
        let mut t = PlotTable::new(cols);
        for r in &self.rows {
            let mut row = vec![r.k as f64, r.empirical];
            if with_model {
                row.push(r.model.unwrap_or(f64::NAN));
            }
            t.push(row).expect("width matches");
        }
        t
    }
}

/// Empirical CCDF over cited papers; the denominator excludes the uncited.
pub fn empirical_ccdf(h: &Histogram) -> Result<CcdfTable> {
    let n = h.n_cited();
    if n == 0 {
        return Err(Error::domain("empirical CCDF of a histogram without cited papers"));
    }
    let nf = n as f64;
    let mut rows = Vec::with_capacity(h.distinct() + 1);
    rows.push(CcdfRow {
        k: 0,
        empirical: 1.0,
        model: None,
    });
    let mut above = n;
    for (k, c) in h.iter() {
        above -= c;
        rows.push(CcdfRow {
            k,
            empirical: above as f64 / nf,
            model: None,
        });
    }
    Ok(CcdfTable { rows })
}

/// Named numeric columns.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl PlotTable {
    pub fn new(columns: Vec<String>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::domain(format!(
                "row has {} values for {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    /// TSV text. Rows holding NaN or infinities are dropped and counted in
    /// a trailing comment so the output stays plottable.
    pub fn to_tsv(&self) -> String {
        let mut s = format!("# {}\n", self.columns.join("\t"));
        let mut dropped = 0;
        for row in &self.rows {
            if row.iter().any(|v| !v.is_finite()) {
                dropped += 1;
                continue;
            }
            let cells: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
            s.push_str(&cells.join("\t"));
            s.push('\n');
        }
        if dropped > 0 {
            let _ = writeln!(s, "# dropped {dropped} rows with non-finite values");
        }
        s
    }
}

pub fn write_plot_table(table: &PlotTable, path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), &table.to_tsv())
}

/// 17 significant digits; round-trips every finite `f64`.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// A fit report together with the data it was fitted to.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportDocument {
    pub dataset: DatasetSummary,
    pub fit: FitReport,
}

impl ReportDocument {
    pub fn new(dataset: DatasetSummary, fit: FitReport) -> Self {
        Self { dataset, fit }
    }

    pub fn to_text(&self) -> String {
        let d = &self.dataset;
        let r = &self.fit;
        let mut s = String::new();
        let kv = |s: &mut String, k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        s.push_str(REPORT_SCHEMA);
        s.push_str("\n\n[dataset]\n");
        kv(&mut s, "path", d.path.clone());
        kv(&mut s, "n_papers", d.n_papers.to_string());
        kv(&mut s, "n_cited", d.n_cited.to_string());
        kv(&mut s, "uncited", d.uncited.to_string());
        kv(&mut s, "total_citations", d.total_citations.to_string());
        kv(&mut s, "max_k", d.max_k.map_or("none".into(), |k| k.to_string()));

        s.push_str("\n[fit]\n");
        kv(&mut s, "model", r.model_kind.to_string());
        kv(&mut s, "method", r.method.to_string());
        kv(&mut s, "n_params", r.n_params.to_string());
        kv(&mut s, "log_likelihood", fmt_f64(r.log_likelihood));
        kv(&mut s, "aic", fmt_f64(r.aic));
        kv(&mut s, "bic", fmt_f64(r.bic));
        kv(&mut s, "converged", r.converged.to_string());
        kv(&mut s, "n_restarts_used", r.n_restarts_used.to_string());
        kv(&mut s, "n_observations", r.n_observations.to_string());
        kv(&mut s, "total_citations", r.total_citations.to_string());

        s.push_str("\n[gof]\n");
        kv(&mut s, "alpha", fmt_f64(r.alpha));
        kv(&mut s, "min_bin_count", r.min_bin_count.to_string());
        kv(&mut s, "available", r.gof.is_some().to_string());
        if let Some(g) = &r.gof {
            kv(&mut s, "chi2_stat", fmt_f64(g.chi2_stat));
            kv(&mut s, "dof", g.dof.to_string());
            kv(&mut s, "p_value", fmt_f64(g.p_value));
            kv(&mut s, "reject", g.reject.to_string());
            kv(&mut s, "n_merged_bins", g.n_merged_bins.to_string());
        }

        s.push_str("\n[params]\n");
        for (name, v) in r.params.names().iter().zip(r.params.values()) {
            kv(&mut s, name, fmt_f64(v));
        }

        if let Some(b) = &r.burst {
            s.push_str("\n[burst]\n");
            kv(&mut s, "interval", b.to_string());
            kv(&mut s, "multiple", b.multiple.to_string());
        }
        s
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let sections = Sections::parse(text, origin)?;
        let ds = sections.get("dataset")?;
        let dataset = DatasetSummary {
            path: ds.raw("path")?.to_owned(),
            n_papers: ds.parse("n_papers")?,
            n_cited: ds.parse("n_cited")?,
            uncited: ds.parse("uncited")?,
            total_citations: ds.parse("total_citations")?,
            max_k: match ds.raw("max_k")? {
                "none" => None,
                _ => Some(ds.parse("max_k")?),
            },
        };

        let fs = sections.get("fit")?;
        let model_kind: ModelKind = fs.parse("model")?;
        let method: FitMethod = fs.parse("method")?;

        let gs = sections.get("gof")?;
        let gof = if gs.parse::<bool>("available")? {
            Some(GofSummary {
                chi2_stat: gs.parse("chi2_stat")?,
                dof: gs.parse("dof")?,
                p_value: gs.parse("p_value")?,
                reject: gs.parse("reject")?,
                n_merged_bins: gs.parse("n_merged_bins")?,
            })
        } else {
            None
        };

        let ps = sections.get("params")?;
        let names = match model_kind {
            ModelKind::Comm => &["c", "mu1", "lambda1", "mu2", "lambda2"][..],
            ModelKind::Baseline(b) => b.param_names(),
        };
        let values = names.iter().map(|n| ps.parse::<f64>(n)).collect::<Result<Vec<_>>>()?;
        let params = FittedParams::from_values(model_kind, &values).map_err(|e| ps.error(0, e.to_string()))?;

        let burst = match sections.find("burst") {
            None => None,
            Some(bs) => Some(BurstPartition {
                interval: parse_interval(bs.raw("interval")?).ok_or_else(|| bs.error(0, "bad interval"))?,
                multiple: bs.parse("multiple")?,
            }),
        };

        Ok(Self {
            dataset,
            fit: FitReport {
                model_kind,
                method,
                params,
                n_params: fs.parse("n_params")?,
                log_likelihood: fs.parse("log_likelihood")?,
                aic: fs.parse("aic")?,
                bic: fs.parse("bic")?,
                gof,
                alpha: gs.parse("alpha")?,
                min_bin_count: gs.parse("min_bin_count")?,
                converged: fs.parse("converged")?,
                n_restarts_used: fs.parse("n_restarts_used")?,
                n_observations: fs.parse("n_observations")?,
                total_citations: fs.parse("total_citations")?,
                burst,
            },
        })
    }
}

/// Inverse of `BurstPartition`'s `Display` for the interval part.
fn parse_interval(s: &str) -> Option<Option<BurstInterval>> {
    if s == "empty" {
        return Some(None);
    }
    let inner = s.strip_prefix('[')?;
    let (lo, rest) = inner.split_once(", ")?;
    let k_lo = parse_u64(lo)?;
    let k_hi = match rest {
        "inf)" => None,
        _ => Some(parse_u64(rest.strip_suffix(']')?)?),
    };
    Some(Some(BurstInterval { k_lo, k_hi }))
}

struct Section<'a> {
    name: &'a str,
    origin: &'a str,
    line: usize,
    entries: Vec<(usize, &'a str, &'a str)>,
}

impl<'a> Section<'a> {
    fn error(&self, line: usize, message: impl Into<String>) -> Error {
        let line = if line == 0 { self.line } else { line };
        parse_err(self.origin, line, format!("[{}] {}", self.name, message.into()))
    }

    fn entry(&self, key: &str) -> Result<(usize, &'a str)> {
        self.entries
            .iter()
            .find(|e| e.1 == key)
            .map(|e| (e.0, e.2))
            .ok_or_else(|| self.error(0, format!("missing key '{key}'")))
    }

    fn raw(&self, key: &str) -> Result<&'a str> {
        self.entry(key).map(|e| e.1)
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let (line, v) = self.entry(key)?;
        v.parse().map_err(|_| self.error(line, format!("bad value '{v}' for '{key}'")))
    }
}

struct Sections<'a> {
    origin: &'a str,
    list: Vec<Section<'a>>,
}

impl<'a> Sections<'a> {
    fn parse(text: &'a str, origin: &'a str) -> Result<Self> {
        let mut it = lines(text);
        match it.next() {
            Some((_, l)) if l.trim() == REPORT_SCHEMA => {}
            _ => return Err(parse_err(origin, 1, format!("expected schema line '{REPORT_SCHEMA}'"))),
        }
        let mut list: Vec<Section<'a>> = Vec::new();
        for (no, raw) in it {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                if list.iter().any(|s| s.name == name) {
                    return Err(parse_err(origin, no, format!("duplicate section [{name}]")));
                }
                list.push(Section {
                    name,
                    origin,
                    line: no,
                    entries: Vec::new(),
                });
                continue;
            }
            let sec = list
                .last_mut()
                .ok_or_else(|| parse_err(origin, no, "entry before any section header"))?;
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| parse_err(origin, no, format!("expected 'key = value', found '{line}'")))?;
            let k = k.trim();
            if sec.entries.iter().any(|e| e.1 == k) {
                return Err(parse_err(origin, no, format!("duplicate key '{k}'")));
            }
            sec.entries.push((no, k, v.trim()));
        }
        Ok(Self { origin, list })
    }

    fn find(&self, name: &str) -> Option<&Section<'a>> {
        self.list.iter().find(|s| s.name == name)
    }

    fn get(&self, name: &str) -> Result<&Section<'a>> {
        self.find(name)
            .ok_or_else(|| parse_err(self.origin, 0, format!("missing section [{name}]")))
    }
}

/// Paths are stored verbatim on one line, so they may not contain line
/// breaks or leading/trailing whitespace.
pub fn write_report(doc: &ReportDocument, path: impl AsRef<Path>) -> Result<()> {
    let p = &doc.dataset.path;
    if p.contains(['\n', '\r']) || p.trim() != p {
        return Err(Error::domain(format!("dataset path {p:?} cannot be stored in a report")));
    }
    write_text(path.as_ref(), &doc.to_text())
}

pub fn read_report(path: impl AsRef<Path>) -> Result<ReportDocument> {
    let path = path.as_ref();
    ReportDocument::parse(&read_text(path)?, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::{fit_mle, GofConfig};
    use crate::model::ModelParams;
    use crate::numerics::OptimizerConfig;
    use crate::synthesis::generate_corpus;
    use proptest::prelude::*;

    #[test]
    fn counts_example() {
        let h = parse_counts("5\n1\n0\n1\n", "t").unwrap();
        assert_eq!(h.iter().collect::<Vec<_>>(), vec![(1, 2), (5, 1)]);
        assert_eq!(h.uncited(), 1);
        assert_eq!(h.total_citations(), 7);
        let s = DatasetSummary::of("t", &h);
        assert_eq!((s.n_papers, s.max_k), (4, Some(5)));
    }

    #[test]
    fn counts_grammar() {
        let h = parse_counts("# header\r\n  3 \r\n\r\n\t2\n# x\n", "t").unwrap();
        assert_eq!(h.n_cited(), 2);
        for bad in ["1\n-2\n", "1\n+2\n", "1.5\n", "1 2\n", "99999999999999999999\n", "0x10\n"] {
            match parse_counts(bad, "f.txt") {
                Err(Error::Parse { line, path, .. }) => {
                    assert_eq!(path, "f.txt");
                    assert!(line >= 1);
                }
                other => panic!("{bad:?}: {other:?}"),
            }
        }
        match parse_counts("1\n2\nx\n", "f") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_counts("", "f"), Err(Error::Domain(_))));
        assert!(matches!(parse_counts("# only\n\n", "f"), Err(Error::Domain(_))));
    }

    #[test]
    fn histogram_grammar() {
        let h = parse_histogram("k,count\n0,10\n1,5\n", "t").unwrap();
        assert_eq!(h.uncited(), 10);
        assert_eq!(h.iter().collect::<Vec<_>>(), vec![(1, 5)]);
        assert!(parse_histogram("k,count\r\n1,5\r\n3,0\r\n", "t").is_ok());
        for bad in [
            "1,5\n",
            "",
            "k,n\n1,5\n",
            "k,count\n2,1\n1,1\n",
            "k,count\n2,1\n2,1\n",
            "k,count\n1\n",
            "k,count\n1,-1\n",
            "k,count\n1,2,3\n",
        ] {
            assert!(matches!(parse_histogram(bad, "t"), Err(Error::Parse { .. })), "{bad:?}");
        }
    }

    #[test]
    fn ccdf_example() {
        let h = Histogram::from_bins([(1, 2), (5, 1)]).unwrap().with_uncited(7);
        let t = empirical_ccdf(&h).unwrap();
        assert_eq!(t.at(0), 1.0);
        assert_eq!(t.at(1), 1.0 / 3.0);
        assert_eq!(t.at(4), 1.0 / 3.0);
        assert_eq!(t.at(5), 0.0);
        assert_eq!(t.at(1000), 0.0);
        assert!(empirical_ccdf(&Histogram::new()).is_err());
    }

    #[test]
    fn ccdf_model_column_aligned() {
        let m = ModelParams::from_array([0.7, 2.0, 1.0, 50.0, 0.5]).unwrap();
        let h = generate_corpus(&m, 2000, 1).unwrap().to_histogram();
        let t = empirical_ccdf(&h).unwrap().with_model(&m);
        let p = t.to_plot_table();
        assert_eq!(p.columns.len(), 3);
        assert_eq!(p.rows.len(), t.rows.len());
        for r in &t.rows {
            let want = 1.0 - (1..=r.k).map(|j| m.pmf(j)).sum::<f64>();
            assert!((r.model.unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn ccdf_large_corpus_is_fast() {
        let m = ModelParams::from_array([0.7, 2.0, 1.0, 50.0, 0.5]).unwrap();
        let h = generate_corpus(&m, 300_000, 2).unwrap().to_histogram();
        let t0 = std::time::Instant::now();
        let t = empirical_ccdf(&h).unwrap();
        assert!(t0.elapsed().as_secs_f64() < 1.0);
        assert_eq!(t.rows.len(), h.distinct() + 1);
    }

    #[test]
    fn plot_table_format() {
        let mut t = PlotTable::new(vec!["x".into(), "y".into()]);
        t.push(vec![0.1, 1.0 / 3.0]).unwrap();
        t.push(vec![1.0, f64::NAN]).unwrap();
        t.push(vec![2.0, f64::INFINITY]).unwrap();
        assert!(t.push(vec![1.0]).is_err());
        let s = t.to_tsv();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# x\ty");
        let vals: Vec<f64> = lines[1].split('\t').map(|v| v.parse().unwrap()).collect();
        assert_eq!(vals, vec![0.1, 1.0 / 3.0]);
        assert_eq!(lines[2], "# dropped 2 rows with non-finite values");
        assert_eq!(lines.len(), 3);
        assert!(!s.contains("NaN") && !s.contains("inf"));
    }

    #[test]
    fn interval_text_round_trip() {
        for p in [
            BurstPartition::empty(),
            BurstPartition {
                interval: Some(BurstInterval { k_lo: 4, k_hi: Some(118) }),
                multiple: false,
            },
            BurstPartition {
                interval: Some(BurstInterval { k_lo: 2, k_hi: None }),
                multiple: true,
            },
        ] {
            assert_eq!(parse_interval(&p.to_string()), Some(p.interval));
        }
        assert_eq!(parse_interval("[4,118]"), None);
    }

    fn fitted_report() -> ReportDocument {
        let m = ModelParams::from_array([0.7, 2.0, 1.0, 50.0, 0.5]).unwrap();
        let h = generate_corpus(&m, 3000, 4).unwrap().to_histogram().with_uncited(12);
        let r = fit_mle(&h, Some(m), &GofConfig::default(), &OptimizerConfig::for_dimension(5)).unwrap();
        ReportDocument::new(DatasetSummary::of("data/corpus.txt", &h), r)
    }

    #[test]
    fn report_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.txt");
        let doc = fitted_report();
        write_report(&doc, &path).unwrap();
        let back = read_report(&path).unwrap();
        assert_eq!(back, doc);
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("citekinetics-report v1\n"));
        assert!(!text.contains('\r'));

        let mut no_gof = doc.clone();
        no_gof.fit.gof = None;
        no_gof.fit.burst = None;
        no_gof.dataset.max_k = None;
        assert_eq!(ReportDocument::parse(&no_gof.to_text(), "x").unwrap(), no_gof);
    }

    #[test]
    fn report_rejects_damage() {
        let text = fitted_report().to_text();
        assert!(ReportDocument::parse(&text.replacen("v1", "v2", 1), "x").is_err());
        assert!(ReportDocument::parse(&text.replace("mu1 = ", "mu_1 = "), "x").is_err());
        assert!(ReportDocument::parse(&text.replace("converged = true", "converged = yes"), "x").is_err());
        let dup = text.replace("[params]\n", "[params]\nc = 0.5\n");
        assert!(matches!(ReportDocument::parse(&dup, "x"), Err(Error::Parse { .. })));
        let mut bad_path = fitted_report();
        bad_path.dataset.path = "a\nb".into();
        let dir = tempfile::tempdir().unwrap();
        assert!(write_report(&bad_path, dir.path().join("r")).is_err());
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("no/such/dir/out.tsv");
        assert!(matches!(
            write_plot_table(&PlotTable::new(vec!["x".into()]), &missing),
            Err(Error::Io { .. })
        ));
        assert!(matches!(read_counts(&missing), Err(Error::Io { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn histogram_file_round_trip(bins in proptest::collection::btree_map(1u64..10_000, 1u64..1000, 0..40), unc in 0u64..50) {
            let h = Histogram::from_bins(bins).unwrap().with_uncited(unc);
            prop_assert_eq!(parse_histogram(&format_histogram(&h), "t").unwrap(), h);
        }

        #[test]
        fn ingest_conserves_totals(counts in proptest::collection::vec(0u64..100_000, 1..200)) {
            let text: String = counts.iter().map(|k| format!("{k}\n")).collect();
            let h = parse_counts(&text, "t").unwrap();
            prop_assert_eq!(h.total_citations(), counts.iter().sum::<u64>());
            prop_assert_eq!(h.uncited(), counts.iter().filter(|&&k| k == 0).count() as u64);
            prop_assert_eq!(h.n_papers(), counts.len() as u64);
        }

        #[test]
        fn ccdf_non_increasing(counts in proptest::collection::vec(1u64..500, 1..300)) {
            let t = empirical_ccdf(&Histogram::from_counts(counts)).unwrap();
            prop_assert_eq!(t.rows[0].empirical, 1.0);
            prop_assert!(t.rows.windows(2).all(|w| w[1].empirical <= w[0].empirical));
            prop_assert_eq!(t.rows.last().unwrap().empirical, 0.0);
        }

        #[test]
        fn floats_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            prop_assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }
}
