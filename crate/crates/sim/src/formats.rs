//! JSON, CSV and alist files.
//!
//! Floats are written with Rust's shortest round-trip formatting so equal
//! values always produce equal bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use bmp_core::channel::BiawgnChannel;
use bmp_core::design::SweepRow;
use bmp_core::exit::ExitPoint;
use bmp_core::graph::{from_alist, to_alist};
use bmp_core::{ChannelObservation, DeTrajectory, DegreeDistribution, Quantizer, TannerGraph};
use serde::{Deserialize, Serialize};

use crate::ber::{BerRecord, TraceRow};
use crate::error::{io_err, Result, SimError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizerJson {
    pub boundaries: Vec<f64>,
    pub last_is_infinite: bool,
}

impl From<&Quantizer> for QuantizerJson {
    fn from(q: &Quantizer) -> Self {
        Self { boundaries: q.finite_boundaries().to_vec(), last_is_infinite: q.last_is_infinite() }
    }
}

impl TryFrom<QuantizerJson> for Quantizer {
    type Error = SimError;
    fn try_from(j: QuantizerJson) -> Result<Self> {
        Ok(Quantizer::new(&j.boundaries, j.last_is_infinite)?)
    }
}

/// `{"sigma_n": x}` or `{"ebn0_db": x, "rate": r}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum ChannelJson {
    Sigma { sigma_n: f64 },
    Ebn0 { ebn0_db: f64, rate: f64 },
}

impl TryFrom<ChannelJson> for BiawgnChannel {
    type Error = SimError;
    fn try_from(j: ChannelJson) -> Result<Self> {
        Ok(match j {
            ChannelJson::Sigma { sigma_n } => BiawgnChannel::from_sigma(sigma_n)?,
            ChannelJson::Ebn0 { ebn0_db, rate } => BiawgnChannel::from_ebn0_db(ebn0_db, rate)?,
        })
    }
}

/// `{"dc": 15, "lambda": {"2": 0.2, "3": 0.1, ...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistJson {
    pub dc: usize,
    pub lambda: BTreeMap<usize, f64>,
}

impl From<&DegreeDistribution> for DistJson {
    fn from(d: &DegreeDistribution) -> Self {
        Self { dc: d.check_degree(), lambda: d.lambda().iter().copied().collect() }
    }
}

impl TryFrom<DistJson> for DegreeDistribution {
    type Error = SimError;
    fn try_from(j: DistJson) -> Result<Self> {
        let pairs: Vec<(usize, f64)> = j.lambda.into_iter().collect();
        Ok(DegreeDistribution::new(&pairs, j.dc)?)
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(io_err(path))
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(io_err(path))
}

pub fn read_quantizer(path: &Path) -> Result<Quantizer> {
    serde_json::from_str::<QuantizerJson>(&read(path)?)?.try_into()
}

pub fn read_channel(path: &Path) -> Result<BiawgnChannel> {
    serde_json::from_str::<ChannelJson>(&read(path)?)?.try_into()
}

pub fn read_distribution(path: &Path) -> Result<DegreeDistribution> {
    parse_distribution(&read(path)?)
}

pub fn parse_distribution(text: &str) -> Result<DegreeDistribution> {
    serde_json::from_str::<DistJson>(text)?.try_into()
}

pub fn distribution_json(d: &DegreeDistribution) -> String {
    let mut s = serde_json::to_string_pretty(&DistJson::from(d)).expect("plain data");
    s.push('\n');
    s
}

pub fn read_alist(path: &Path) -> Result<TannerGraph> {
    Ok(from_alist(&read(path)?)?)
}

pub fn write_alist(path: &Path, g: &TannerGraph) -> Result<()> {
    write_file(path, &to_alist(g))
}

pub fn exit_csv(curves: &[(&str, Vec<ExitPoint>)]) -> String {
    let mut s = String::from("curve,eps_a,eps_e,i_a,i_e\n");
    for (name, points) in curves {
        for p in points {
            let _ = writeln!(s, "{name},{},{},{},{}", p.eps_a, p.eps_e, p.i_a, p.i_e);
        }
    }
    s
}

pub fn de_csv(t: &DeTrajectory) -> String {
    let mut s = String::from("iteration,eps_ev,eps_ec,D_av\n");
    for (l, ev, ec, d) in t.rows() {
        let _ = writeln!(s, "{l},{ev},{ec},{d}");
    }
    s
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s =
        String::from("rate,dc,threshold_db,capacity_gap_db,channel_case,biawgn_limit_db,bsc_limit_db\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.rate, r.d_c, r.threshold_db, r.capacity_gap_db, r.channel, r.biawgn_limit_db, r.bsc_limit_db
        );
    }
    s
}

pub fn ber_csv(records: &[BerRecord]) -> String {
    let mut s =
        String::from("ebn0_db,frames,bits,bit_errors,frame_errors,ber,fer,mean_iterations,censored\n");
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.ebn0_db,
            r.frames,
            r.bits,
            r.bit_errors,
            r.frame_errors,
            r.ber,
            r.fer,
            r.mean_iterations,
            r.censored
        );
    }
    s
}

pub fn trace_csv(rows: &[TraceRow]) -> String {
    let mut s = String::from("iteration,eps_ev_de,eps_ev_sim\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{}", r.iteration, r.de, r.empirical);
    }
    s
}

/// `variable_index,sign,subchannel_index` rows, sign as `1` or `-1`.
pub fn observations_csv(obs: &[ChannelObservation]) -> String {
    let mut s = String::from("variable_index,sign,subchannel_index\n");
    for (v, o) in obs.iter().enumerate() {
        let _ = writeln!(s, "{v},{},{}", o.sign(), o.subchannel);
    }
    s
}

pub fn parse_observations(text: &str) -> Result<Vec<ChannelObservation>> {
    let mut lines = text.lines();
    match lines.next() {
        Some("variable_index,sign,subchannel_index") => {}
        _ => return Err(SimError::Format("observation file: missing header".into())),
    }
    let mut out = Vec::new();
    for (k, line) in lines.enumerate() {
        let bad = || SimError::Format(format!("observation file line {}: malformed", k + 2));
        let f: Vec<&str> = line.split(',').collect();
        let [v, sign, w] = f.as_slice() else { return Err(bad()) };
        let v: usize = v.parse().map_err(|_| bad())?;
        if v != out.len() {
            return Err(SimError::Format(format!("observation file line {}: index {v} out of order", k + 2)));
        }
        let negative = match *sign {
            "1" => false,
            "-1" => true,
            _ => return Err(bad()),
        };
        out.push(ChannelObservation::new(negative, w.parse().map_err(|_| bad())?));
    }
    Ok(out)
}
