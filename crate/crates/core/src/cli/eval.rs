use crate::error::{Error, Result};
use crate::metrics::{ari, labels_from_sets, rmse_subcube, weighted_rmse};
use crate::report::ClustersJson;
use crate::tensor::{IndexSet, Mode, Tensor3};

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub ari: Option<[f64; 3]>,
    /// `(rmse, volume)` per tricluster.
    pub rmse: Vec<(f64, usize)>,
    pub rmse_weighted: Option<f64>,
}

impl Evaluation {
    pub fn ari_mean(&self) -> Option<f64> {
        self.ari.map(|a| a.iter().sum::<f64>() / 3.0)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,target,value\n");
        if let Some(a) = self.ari {
            for (mode, v) in Mode::ALL.iter().zip(a) {
                out.push_str(&format!("ari,mode-{},{v}\n", mode.number()));
            }
            out.push_str(&format!("ari,mean,{}\n", self.ari_mean().unwrap_or(f64::NAN)));
        }
        for (i, (r, _)) in self.rmse.iter().enumerate() {
            out.push_str(&format!("rmse,tricluster-{i},{r}\n"));
        }
        if let Some(w) = self.rmse_weighted {
            out.push_str(&format!("rmse,weighted,{w}\n"));
        }
        out
    }
}

/// Scores a clusters document against truth labels and/or the tensor.
pub fn evaluate(doc: &ClustersJson, truth: Option<&[Vec<i64>; 3]>, tensor: Option<&Tensor3>) -> Result<Evaluation> {
    if let (Some(truth), Some(t)) = (truth, tensor) {
        let tdims = [truth[0].len(), truth[1].len(), truth[2].len()];
        if tdims != t.dims() {
            return Err(Error::Validation(format!(
                "truth dims {tdims:?} do not match tensor dims {:?}",
                t.dims()
            )));
        }
    }
    let ari_modes = match truth {
        Some(truth) => {
            let mut out = [0.0; 3];
            for mode in Mode::ALL {
                let expected = &truth[mode.axis()];
                let m = expected.len();
                if let Some(mj) = doc.modes.iter().find(|x| x.mode == mode) {
                    if !mj.d.is_empty() && mj.d.len() != m {
                        return Err(Error::Validation(format!(
                            "{mode}: prediction covers {} slices, truth {m}",
                            mj.d.len()
                        )));
                    }
                }
                let predicted = labels_from_sets(doc.mode_clusters(mode), m)?;
                out[mode.axis()] = ari(expected, &predicted)?;
            }
            Some(out)
        }
        None => None,
    };

    let mut rmse = Vec::new();
    if let Some(t) = tensor {
        for tri in &doc.triclusters {
            let sets = [(&tri.j1, Mode::One), (&tri.j2, Mode::Two), (&tri.j3, Mode::Three)]
                .map(|(v, m)| IndexSet::new(m, v.clone(), t.dim(m)));
            let [a, b, c] = sets;
            let (a, b, c) = (a?, b?, c?);
            let vol = a.len() * b.len() * c.len();
            rmse.push((rmse_subcube(t, (&a, &b, &c))?, vol));
        }
    }
    let rmse_weighted = weighted_rmse(&rmse);
    Ok(Evaluation {
        ari: ari_modes,
        rmse,
        rmse_weighted,
    })
}
