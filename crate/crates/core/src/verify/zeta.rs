use serde::{Deserialize, Serialize};

use super::{count_points_ext, weil_window, VerifiedCurve, VerifyError};

/// Point counts and the `L`-polynomial they determine under a genus claim.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ZetaData {
    pub q: u64,
    pub genus: u64,
    /// `N_1, …, N_{g+2}`.
    pub counts: Vec<u64>,
    /// `a_0, …, a_{2g}` of `L(T)`.
    pub l_coeffs: Vec<i128>,
    /// Predicted `N_{g+1}` and `N_{g+2}`.
    pub predicted: Vec<i128>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "camelCase")]
pub enum ZetaVerdict {
    Consistent { data: ZetaData },
    Inconsistent { reason: String, data: Option<ZetaData> },
}

impl ZetaVerdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, ZetaVerdict::Consistent { .. })
    }
}

fn ov(what: &'static str) -> VerifyError {
    VerifyError::Overflow(what)
}

/// Recovers `L(T)` from `N_1, …, N_g` by Newton's identities, extends it by
/// the functional equation, and tests the prediction against `N_{g+1}`,
/// `N_{g+2}` and every count against the Weil window.
pub fn zeta_check<C>(q: u64, g_claim: u64, mut count: C) -> Result<ZetaVerdict, VerifyError>
where
    C: FnMut(u32) -> Result<u64, VerifyError>,
{
    let g = g_claim as usize;
    let counts: Vec<u64> = (1..=g as u32 + 2).map(&mut count).collect::<Result<_, _>>()?;
    let qi = q as i128;
    let qpow = |k: u32| qi.checked_pow(k).ok_or(ov("q^k"));
    // s_k = N_k − q^k − 1 = −Σ ω^k
    let mut s = vec![0i128];
    for (k, &n) in counts.iter().enumerate() {
        s.push(n as i128 - qpow(k as u32 + 1)? - 1);
    }
    let weil_bad = counts.iter().enumerate().find(|(k, &n)| !weil_window(n, *k as u32 + 1, g_claim, q));
    let mut a = vec![0i128; 2 * g + 1];
    a[0] = 1;
    for k in 1..=g {
        let mut acc = 0i128;
        for i in 1..=k {
            acc = s[i].checked_mul(a[k - i]).and_then(|x| x.checked_add(acc)).ok_or(ov("Newton sum"))?;
        }
        if acc % k as i128 != 0 {
            return Ok(ZetaVerdict::Inconsistent {
                reason: format!("a_{k} = {acc}/{k} is not an integer"),
                data: None,
            });
        }
        a[k] = acc / k as i128;
    }
    for i in 0..g {
        a[2 * g - i] = qpow((g - i) as u32)?.checked_mul(a[i]).ok_or(ov("functional equation"))?;
    }
    // s_k = k a_k − Σ_{i<k} s_i a_{k−i}
    let mut predicted = Vec::new();
    let mut sp = s[..=g].to_vec();
    for k in g + 1..=g + 2 {
        let ak = a.get(k).copied().unwrap_or(0);
        let mut acc = (k as i128).checked_mul(ak).ok_or(ov("prediction"))?;
        for (i, si) in sp.iter().enumerate().take(k).skip(1) {
            let aki = a.get(k - i).copied().unwrap_or(0);
            acc = si.checked_mul(aki).and_then(|x| acc.checked_sub(x)).ok_or(ov("prediction"))?;
        }
        sp.push(acc);
        predicted.push(acc + qpow(k as u32)? + 1);
    }
    let class_number: i128 = a.iter().try_fold(0i128, |x, &y| x.checked_add(y)).ok_or(ov("L(1)"))?;
    let data = ZetaData { q, genus: g_claim, counts: counts.clone(), l_coeffs: a, predicted: predicted.clone() };
    let reason = if let Some((k, n)) = weil_bad {
        Some(format!("N_{} = {n} violates the Weil bound for genus {g_claim}", k + 1))
    } else if let Some(j) = (0..2).find(|&j| predicted[j] != counts[g + j] as i128) {
        Some(format!("predicted N_{} = {}, counted {}", g + 1 + j, predicted[j], counts[g + j]))
    } else if class_number <= 0 {
        Some(format!("L(1) = {class_number} is not positive"))
    } else {
        None
    };
    Ok(match reason {
        None => ZetaVerdict::Consistent { data },
        Some(reason) => ZetaVerdict::Inconsistent { reason, data: Some(data) },
    })
}

/// [`zeta_check`] on a verified curve with counts from [`count_points_ext`].
pub fn zeta_genus(v: &VerifiedCurve, g_claim: u64, cap: u64, jobs: Option<usize>) -> Result<ZetaVerdict, VerifyError> {
    let q = v.field().order();
    let top = g_claim as u32 + 2;
    if (q as u128).checked_pow(top).is_none_or(|s| s > cap as u128) {
        return Err(VerifyError::CapExceeded { size: q.saturating_pow(top), cap });
    }
    zeta_check(q, g_claim, |k| count_points_ext(v, k as usize, cap, jobs))
}
