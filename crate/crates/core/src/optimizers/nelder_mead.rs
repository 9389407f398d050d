//! Nelder-Mead simplex search with reflection 1, expansion 2, contraction 1/2
//! and shrink 1/2. Every evaluation is its own round-trip: the method is
//! inherently sequential.

use super::{HpReader, Hyperparameters, OptimizerKind, Session};
use crate::error::{Error, Result};
use crate::objective::Objective;

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

#[derive(Clone, Debug, PartialEq)]
pub struct NelderMeadParams {
    pub delta: f64,
    pub shots: u64,
    pub max_evals: Option<u64>,
}

impl NelderMeadParams {
    pub fn from_map(map: &Hyperparameters) -> Result<Self> {
        let r = HpReader::new(OptimizerKind::NelderMead, map)?;
        Ok(NelderMeadParams { delta: r.positive("delta")?, shots: r.shots()?, max_evals: r.max_evals()? })
    }
}

/// `x0` plus one vertex per coordinate, that coordinate scaled by `1 + delta`
/// (or offset by `delta` when it is zero).
pub fn initial_simplex(x0: &[f64], delta: f64) -> Vec<Vec<f64>> {
    let mut out = vec![x0.to_vec()];
    for i in 0..x0.len() {
        let mut v = x0.to_vec();
        if v[i] == 0.0 {
            v[i] = delta;
        } else {
            v[i] *= 1.0 + delta;
        }
        out.push(v);
    }
    out
}

fn lerp(from: &[f64], to: &[f64], t: f64) -> Vec<f64> {
    from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
}

pub fn minimize<O: Objective + ?Sized>(s: &mut Session<'_, O>, x0: &[f64], p: &NelderMeadParams) -> Result<()> {
    let d = x0.len();
    if d == 0 {
        return Err(Error::invalid("Nelder-Mead needs at least one parameter"));
    }
    let eval = |s: &mut Session<'_, O>, x: &[f64]| -> Result<Option<f64>> {
        Ok(s.evaluate(&[x.to_vec()], p.shots)?.map(|v| v[0]))
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    for v in initial_simplex(x0, p.delta) {
        let Some(f) = eval(s, &v)? else { return Ok(()) };
        simplex.push((v, f));
    }
    loop {
        // stable sort keeps earlier vertices first among ties
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        s.record(&simplex[0].0);
        let mut centroid = vec![0.0; d];
        for (v, _) in &simplex[..d] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / d as f64;
            }
        }
        let (worst, f_worst) = simplex[d].clone();
        let f_best = simplex[0].1;
        let f_second = simplex[d - 1].1;

        let xr = lerp(&centroid, &worst, -REFLECT);
        let Some(fr) = eval(s, &xr)? else { return Ok(()) };
        if fr < f_best {
            let xe = lerp(&centroid, &xr, EXPAND);
            let Some(fe) = eval(s, &xe)? else { return Ok(()) };
            simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < f_second {
            simplex[d] = (xr, fr);
            continue;
        }
        let accepted = if fr < f_worst {
            let xc = lerp(&centroid, &xr, CONTRACT);
            let Some(fc) = eval(s, &xc)? else { return Ok(()) };
            (fc <= fr).then_some((xc, fc))
        } else {
            let xc = lerp(&centroid, &worst, CONTRACT);
            let Some(fc) = eval(s, &xc)? else { return Ok(()) };
            (fc < f_worst).then_some((xc, fc))
        };
        match accepted {
            Some(v) => simplex[d] = v,
            None => {
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let x = lerp(&best, &vertex.0, SHRINK);
                    let Some(f) = eval(s, &x)? else { return Ok(()) };
                    *vertex = (x, f);
                }
            }
        }
    }
}
