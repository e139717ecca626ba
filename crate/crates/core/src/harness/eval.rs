use std::collections::BTreeSet;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec::{read_labels, read_matte, write_atomic};
use crate::error::{Error, Result};
use crate::harness::list_ids;
use crate::metrics::{MetricParams, MetricReport, evaluate};

/// Arithmetic means over successfully evaluated images.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanMetrics {
    pub sad: f64,
    pub mse: f64,
    pub grad: f64,
    pub conn: f64,
    #[serde(rename = "pixels_T")]
    pub pixels_t: f64,
}

pub fn mean_metrics(reports: &[MetricReport]) -> Option<MeanMetrics> {
    if reports.is_empty() {
        return None;
    }
    let n = reports.len() as f64;
    let sum = |f: fn(&MetricReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
    Some(MeanMetrics {
        sad: sum(|r| r.sad),
        mse: sum(|r| r.mse),
        grad: sum(|r| r.grad),
        conn: sum(|r| r.conn),
        pixels_t: sum(|r| r.pixels_t as f64),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EvalRow {
    Ok {
        id: String,
        #[serde(flatten)]
        report: MetricReport,
    },
    Failed {
        id: String,
        error: String,
    },
}

impl EvalRow {
    pub fn id(&self) -> &str {
        match self {
            EvalRow::Ok { id, .. } | EvalRow::Failed { id, .. } => id,
        }
    }

    pub fn report(&self) -> Option<&MetricReport> {
        match self {
            EvalRow::Ok { report, .. } => Some(report),
            EvalRow::Failed { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
    pub mean: Option<MeanMetrics>,
    /// Ground-truth ids with no prediction.
    pub missing: Vec<String>,
    /// Predictions with no ground truth.
    pub extra: Vec<String>,
}

impl EvalReport {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.report().is_none()).count()
    }

    /// Any unreadable image or missing prediction.
    pub fn is_partial(&self) -> bool {
        self.failures() > 0 || !self.missing.is_empty()
    }

    /// CSV with columns `id,sad,mse,grad,conn,pixels_T`; failed rows leave the
    /// metric fields blank, and a final `mean` row holds the means.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["id", "sad", "mse", "grad", "conn", "pixels_T"])?;
        for row in &self.rows {
            match row {
                EvalRow::Ok { id, report: r } => w.write_record([
                    id.clone(),
                    r.sad.to_string(),
                    r.mse.to_string(),
                    r.grad.to_string(),
                    r.conn.to_string(),
                    r.pixels_t.to_string(),
                ])?,
                EvalRow::Failed { id, .. } => w.write_record([id.as_str(), "", "", "", "", ""])?,
            }
        }
        if let Some(m) = &self.mean {
            w.write_record([
                "mean".to_string(),
                m.sad.to_string(),
                m.mse.to_string(),
                m.grad.to_string(),
                m.conn.to_string(),
                m.pixels_t.to_string(),
            ])?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }
}

fn eval_one(
    id: &str,
    pred_dir: &Path,
    gt_dir: &Path,
    trimap_dir: &Path,
    params: &MetricParams,
) -> Result<MetricReport> {
    let file = format!("{id}.png");
    let pred = read_matte(&pred_dir.join(&file))?;
    let gt = read_matte(&gt_dir.join(&file))?;
    let trimap = read_labels(&trimap_dir.join(&file))?;
    evaluate(&pred, &gt, &trimap, params)
}

/// Evaluates every prediction that has a ground truth. Per-image failures
/// become error rows; no matched ids at all is an error.
pub fn run_eval(
    pred_dir: &Path,
    gt_dir: &Path,
    trimap_dir: &Path,
    params: &MetricParams,
) -> Result<EvalReport> {
    params.validate()?;
    let preds: BTreeSet<String> = list_ids(pred_dir)?.into_iter().collect();
    let gts: BTreeSet<String> = list_ids(gt_dir)?.into_iter().collect();
    let matched: Vec<&String> = preds.intersection(&gts).collect();
    if matched.is_empty() {
        return Err(Error::NoMatchedIds);
    }
    let rows: Vec<EvalRow> = matched
        .par_iter()
        .map(
            |id| match eval_one(id, pred_dir, gt_dir, trimap_dir, params) {
                Ok(report) => EvalRow::Ok {
                    id: id.to_string(),
                    report,
                },
                Err(e) => EvalRow::Failed {
                    id: id.to_string(),
                    error: e.to_string(),
                },
            },
        )
        .collect();
    let ok: Vec<MetricReport> = rows.iter().filter_map(|r| r.report().copied()).collect();
    Ok(EvalReport {
        mean: mean_metrics(&ok),
        missing: gts.difference(&preds).cloned().collect(),
        extra: preds.difference(&gts).cloned().collect(),
        rows,
    })
}

/// Writes `<stem>.csv` and `<stem>.json`.
pub fn write_report(report: &EvalReport, stem: &Path) -> Result<()> {
    write_atomic(&stem.with_extension("csv"), &report.to_csv()?)?;
    let mut json = serde_json::to_vec_pretty(report)?;
    json.push(b'\n');
    write_atomic(&stem.with_extension("json"), &json)
}
