use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fock::MomentumGrid;
use crate::linalg::C64;

use super::family::{KernelFamily, NormParams, KERNEL_ORDERS};
use super::wick::WickKernel;

fn pair(z: C64) -> Value {
    json!([z.re, z.im])
}

fn unpair(v: &Value) -> Result<C64> {
    let a = v.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad("complex value must be [re, im]"))?;
    let re = a[0].as_f64().ok_or_else(|| bad("non-numeric real part"))?;
    let im = a[1].as_f64().ok_or_else(|| bad("non-numeric imaginary part"))?;
    Ok(C64::new(re, im))
}

fn bad(msg: &str) -> Error {
    Error::InvalidParameter(format!("kernel family JSON: {msg}"))
}

/// JSON document: grids, parameters, `w00`, and each kernel as nested
/// `r × k (× k)` lists of `[re, im]` pairs.
pub fn family_to_json(f: &KernelFamily) -> Value {
    let kernels: Vec<Value> = f
        .kernels()
        .iter()
        .map(|w| {
            let (m, n) = w.order();
            let rows: Vec<Value> = (0..w.n_r())
                .map(|r| {
                    if w.arity() == 1 {
                        Value::Array((0..w.n_k()).map(|a| pair(w.get(r, &[a]))).collect())
                    } else {
                        Value::Array(
                            (0..w.n_k())
                                .map(|a| Value::Array((0..w.n_k()).map(|b| pair(w.get(r, &[a, b]))).collect()))
                                .collect(),
                        )
                    }
                })
                .collect();
            json!({ "m": m, "n": n, "values": rows })
        })
        .collect();
    let p = f.params();
    json!({
        "sigma": f.grid().sigma(),
        "n_k": f.grid().len(),
        "dimension": f.grid().dimension(),
        "params": { "mu": p.mu, "s": p.s, "xi": p.xi },
        "r": f.rgrid().points(),
        "w00": f.w00().iter().map(|&z| pair(z)).collect::<Vec<_>>(),
        "kernels": kernels,
    })
}

pub fn family_from_json(v: &Value) -> Result<KernelFamily> {
    let num = |k: &str| v.get(k).and_then(Value::as_f64).ok_or_else(|| bad(&format!("missing {k}")));
    let sigma = num("sigma")?;
    let n_k = num("n_k")? as usize;
    let dim = num("dimension")? as u32;
    let grid = MomentumGrid::with_dimension(sigma, n_k, dim)?;
    let p = v.get("params").ok_or_else(|| bad("missing params"))?;
    let pn = |k: &str| p.get(k).and_then(Value::as_f64).ok_or_else(|| bad(&format!("missing params.{k}")));
    let params = NormParams::new(pn("mu")?, pn("s")? as usize, pn("xi")?)?;
    let w00 = v
        .get("w00")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing w00"))?
        .iter()
        .map(unpair)
        .collect::<Result<Vec<_>>>()?;
    let ks = v.get("kernels").and_then(Value::as_array).ok_or_else(|| bad("missing kernels"))?;
    if ks.len() != KERNEL_ORDERS.len() {
        return Err(bad("expected five kernels"));
    }
    let n_r = w00.len();
    let mut kernels = Vec::new();
    for (kv, &(m, n)) in ks.iter().zip(&KERNEL_ORDERS) {
        let km = kv.get("m").and_then(Value::as_u64);
        let kn = kv.get("n").and_then(Value::as_u64);
        if km != Some(m as u64) || kn != Some(n as u64) {
            return Err(bad("kernels out of order"));
        }
        let rows = kv.get("values").and_then(Value::as_array).ok_or_else(|| bad("missing values"))?;
        let mut flat = Vec::new();
        for row in rows {
            let row = row.as_array().ok_or_else(|| bad("row is not a list"))?;
            for item in row {
                if m + n == 1 {
                    flat.push(unpair(item)?);
                } else {
                    for z in item.as_array().ok_or_else(|| bad("inner row is not a list"))? {
                        flat.push(unpair(z)?);
                    }
                }
            }
        }
        kernels.push(WickKernel::from_values(m, n, n_r, n_k, flat)?);
    }
    KernelFamily::from_parts(&grid, w00, kernels, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bit_exact_round_trip() {
        let g = MomentumGrid::new(0.5, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = KernelFamily::random(&g, NormParams::new(0.5, 2, 0.01).unwrap(), 0.3, false, &mut rng).unwrap();
        let text = serde_json::to_string(&family_to_json(&f)).unwrap();
        let back = family_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, f);
    }
}
