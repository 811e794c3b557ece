use oscd_core::oscint::*;
use oscd_core::phase::*;
use std::time::Instant;

fn main() {
    let amp = Amplitude::default();
    let cfg = QuadratureConfig::default();
    let fam3 = PhaseFamily::Linear(DPhase::model(3, SignBranch::Plus));
    // NLA phase x1(x2-x1^2)^2 + x1^7 as polynomial terms
    let nla = PhaseFamily::Linear(DPhase::NormalForm {
        n: oscd_core::normalform::Inv::Finite(7),
        m: oscd_core::normalform::Inv::Finite(2),
        omega0: 1.0, beta0: 1.0, b1_0: 1.0, b2_0: 0.0,
    });
    for lam_pow in [10u32, 13, 16] {
        let lam = (1u64 << lam_pow) as f64;
        let t = Instant::now();
        let d = integrate_direct(&fam3.at([0.0,0.0]).unwrap(), &amp, lam, &cfg).unwrap();
        let td = t.elapsed();
        let t = Instant::now();
        let r = integrate_reduced_model(3, SignBranch::Plus, [0.0,0.0], lam, &cfg, &amp).unwrap();
        let tr = t.elapsed();
        println!("lam=2^{lam_pow} direct: {:?} evals={} |I|={:.6e} err={:.1e} | reduced: {:?} evals={} |I|={:.6e} scaled={:.6}",
            td, d.evals, d.value.norm(), d.err_est, tr, r.evals, r.value.norm(),
            lam.powf(2.0/3.0)*r.value.norm());
    }
    for lam_pow in [10u32, 13] {
        let lam = (1u64 << lam_pow) as f64;
        let t = Instant::now();
        let d = integrate_direct(&nla.at([0.01,0.005]).unwrap(), &amp, lam, &cfg).unwrap();
        println!("NLA lam=2^{lam_pow} direct: {:?} evals={} |I|={:.6e} err={:.1e}", t.elapsed(), d.evals, d.value.norm(), d.err_est);
    }
}
