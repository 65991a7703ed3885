//! Seeded randomized property suites, one per library module.  Failures
//! report the concrete counterexample instance.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use revprimes::digits::{self, torus_norm, unit_exp, Base};
use revprimes::expsums;
use revprimes::fourier::{self, FourierPoint, RationalAngle};
use revprimes::kernel;
use revprimes::sieve::{naive, PrimeBlock};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Size {
    Small,
    Medium,
    Large,
}

impl Size {
    fn scale(self) -> usize {
        match self {
            Size::Small => 1,
            Size::Medium => 4,
            Size::Large => 16,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub suite: &'static str,
    pub check: &'static str,
    pub instances: usize,
    pub failures: usize,
    /// First counterexample, when any.
    pub detail: Option<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

struct Recorder {
    suite: &'static str,
    results: Vec<CheckResult>,
}

impl Recorder {
    fn run(
        &mut self,
        check: &'static str,
        instances: usize,
        mut one: impl FnMut(usize) -> Result<(), String>,
    ) {
        let mut failures = 0;
        let mut detail = None;
        for i in 0..instances {
            if let Err(msg) = one(i) {
                failures += 1;
                detail.get_or_insert(msg);
            }
        }
        self.results.push(CheckResult {
            suite: self.suite,
            check,
            instances,
            failures,
            detail,
        });
    }
}

fn base(b: u32) -> Base {
    Base::new(b).unwrap()
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn digits_suite(seed: u64, size: Size) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rec = Recorder {
        suite: "digits",
        results: Vec::new(),
    };
    let n = 400 * size.scale();

    rec.run("reverse involution", n, |_| {
        let b = rng.gen_range(2..12u32);
        let lambda = rng.gen_range(0..10u32);
        let cap = base(b).pow(lambda).unwrap();
        let m = if cap == 0 { 0 } else { rng.gen::<u64>() as u128 % cap };
        let r = digits::reverse(m, base(b), lambda).unwrap();
        let back = digits::reverse(r, base(b), lambda).unwrap();
        (back == m)
            .then_some(())
            .ok_or(format!("b={b} λ={lambda} n={m}: R(R(n))={back}"))
    });

    rec.run("reverse split law", n, |_| {
        let b = rng.gen_range(2..5u32);
        let lambda = rng.gen_range(0..9u32);
        let cut = rng.gen_range(0..=lambda);
        let p_lo = base(b).pow(cut).unwrap();
        let p_hi = base(b).pow(lambda - cut).unwrap();
        let n1 = rng.gen::<u64>() as u128 % p_lo.max(1);
        let n2 = rng.gen::<u64>() as u128 % p_hi.max(1);
        let whole = digits::reverse(n1 + p_lo * n2, base(b), lambda).unwrap();
        let split = p_hi * digits::reverse(n1, base(b), cut).unwrap()
            + digits::reverse(n2, base(b), lambda - cut).unwrap();
        (whole == split)
            .then_some(())
            .ok_or(format!("b={b} λ={lambda} λ'={cut} n1={n1} n2={n2}"))
    });

    rec.run("reverse congruences", n, |_| {
        let b = rng.gen_range(2..12u32);
        let lambda = rng.gen_range(1..8u32);
        let cap = base(b).pow(lambda).unwrap();
        let m = rng.gen::<u64>() as u128 % cap;
        let r = digits::reverse(m, base(b), lambda).unwrap();
        let bb = u128::from(b);
        let top = digits::expand(m, base(b), lambda).unwrap().digits()[lambda as usize - 1];
        let c1 = r % bb == u128::from(top) % bb;
        let c2 = r % (bb - 1) == m % (bb - 1);
        let flip = (lambda - 1) % 2 == 1;
        let rhs = if flip { ((bb + 1) - m % (bb + 1)) % (bb + 1) } else { m % (bb + 1) };
        let c3 = r % (bb + 1) == rhs;
        (c1 && c2 && c3)
            .then_some(())
            .ok_or(format!("b={b} λ={lambda} n={m}"))
    });

    rec.run("torus norm/exp", n, |_| {
        let x = rng.gen::<f64>() * 2e6 - 1e6;
        let nx = torus_norm(x);
        let ok = (0.0..=0.5).contains(&nx)
            && (torus_norm(-x) - nx).abs() < 1e-9
            && (unit_exp(x).norm() - 1.0).abs() < 1e-12;
        ok.then_some(()).ok_or(format!("x={x}"))
    });

    rec.results
}

pub fn kernel_suite(seed: u64, size: Size) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xD1CE);
    let mut rec = Recorder {
        suite: "kernel",
        results: Vec::new(),
    };
    let n = 300 * size.scale();

    rec.run("|K| <= 1 and Fejer expansion", n, |_| {
        let b = rng.gen_range(2..12u32);
        let x = rng.gen::<f64>() * 4.0 - 2.0;
        let k = kernel::dirichlet_kernel(base(b), x);
        if k.abs() > 1.0 {
            return Err(format!("b={b} x={x}: |K|={k}"));
        }
        let bf = f64::from(b);
        let mut s = 1.0 / bf;
        for h in 1..b {
            s += 2.0 / bf * (1.0 - f64::from(h) / bf) * unit_exp(f64::from(h) * x).re;
        }
        ((k * k - s).abs() < 1e-12)
            .then_some(())
            .ok_or(format!("b={b} x={x}: K²−Fejér = {}", k * k - s))
    });

    rec.run("gaussian domination", n, |_| {
        let b = rng.gen_range(2..12u32);
        let bf = f64::from(b);
        let t = (rng.gen::<f64>() * 2.0 - 1.0) / bf;
        let norm = torus_norm(t);
        let bound = (-(std::f64::consts::PI.powi(2) / 6.0) * (bf * bf - 1.0) * norm * norm).exp();
        (kernel::dirichlet_kernel(base(b), t).abs() <= bound + 1e-13)
            .then_some(())
            .ok_or(format!("b={b} t={t}"))
    });

    rec.run("psi below maximum", n, |_| {
        let b = rng.gen_range(2..12u32);
        let bf = f64::from(b);
        let x = rng.gen::<f64>();
        let cap = kernel::psi(base(b), 1.0 / (2.0 * bf));
        (kernel::psi(base(b), x) <= cap + 1e-12)
            .then_some(())
            .ok_or(format!("b={b} x={x}"))
    });

    rec.run("T within certified max", n, |_| {
        let b = rng.gen_range(2..8u32);
        let kappa = *[1.0, 2.0, 5.0, 25.0].choose(&mut rng).unwrap();
        let m = kernel::max_t(base(b), kappa).map_err(|e| e.to_string())?;
        let a = rng.gen::<f64>();
        let v = kernel::t_mean(base(b), kappa, a).unwrap();
        (v <= m.value + m.margin + 1e-13)
            .then_some(())
            .ok_or(format!("b={b} κ={kappa} α={a}: T={v} > {}", m.value))
    });

    rec.run("cross-norm bound", n, |_| {
        let b = rng.gen_range(2..12u32);
        let bf = f64::from(b);
        let (a, t) = (rng.gen::<f64>(), rng.gen::<f64>());
        let lhs = torus_norm(a * bf - t).max(torus_norm(a - t * bf));
        let rhs =
            torus_norm(a * (bf * bf - 1.0)).max(torus_norm(t * (bf * bf - 1.0))) / (bf + 1.0);
        (lhs >= rhs - 1e-12)
            .then_some(())
            .ok_or(format!("b={b} α={a} ϑ={t}"))
    });

    rec.results
}

pub fn fourier_suite(seed: u64, size: Size) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xF0_0F);
    let mut rec = Recorder {
        suite: "fourier",
        results: Vec::new(),
    };
    let n = 60 * size.scale();

    rec.run("product formula vs oracle", n, |_| {
        let b = *[2u32, 3, 5].choose(&mut rng).unwrap();
        let lambda = rng.gen_range(0..=8u32);
        if u64::from(b).pow(lambda) > 50_000 {
            return Ok(());
        }
        let p = FourierPoint::new(base(b), lambda, rng.gen(), rng.gen());
        let direct = fourier::f_direct(&p).map_err(|e| e.to_string())?.norm();
        let product = fourier::f_abs_product(&p);
        ((direct - product).abs() <= 1e-12 * lambda.max(1) as f64)
            .then_some(())
            .ok_or(format!("b={b} λ={lambda} α={} ϑ={}", p.alpha, p.theta))
    });

    rec.run("splitting formula", n, |_| {
        let b = *[2u32, 3, 4].choose(&mut rng).unwrap();
        let bf = f64::from(b);
        let lambda = rng.gen_range(0..=8u32);
        let cut = rng.gen_range(0..=lambda);
        let (a, t) = (rng.gen::<f64>(), rng.gen::<f64>());
        let full = fourier::f_abs_product(&FourierPoint::new(base(b), lambda, a, t));
        let lo = fourier::f_abs_product(&FourierPoint::new(
            base(b),
            cut,
            a * bf.powi((lambda - cut) as i32),
            t,
        ));
        let hi = fourier::f_abs_product(&FourierPoint::new(
            base(b),
            lambda - cut,
            a,
            t * bf.powi(cut as i32),
        ));
        ((full - lo * hi).abs() < 1e-12)
            .then_some(())
            .ok_or(format!("b={b} λ={lambda} λ'={cut}"))
    });

    rec.run("symmetry", n, |_| {
        let b = *[2u32, 3].choose(&mut rng).unwrap();
        let lambda = rng.gen_range(1..=5u32);
        let (a, t) = (rng.gen::<f64>(), rng.gen::<f64>());
        let f = fourier::f_direct(&FourierPoint::new(base(b), lambda, a, t))
            .map_err(|e| e.to_string())?;
        let swap = fourier::f_direct(&FourierPoint::new(base(b), lambda, t, a))
            .map_err(|e| e.to_string())?;
        ((f.conj() - swap).norm() < 1e-12)
            .then_some(())
            .ok_or(format!("b={b} λ={lambda}"))
    });

    rec.run("L2 residue identity", n.div_ceil(2), |_| {
        let b = *[2u32, 3].choose(&mut rng).unwrap();
        let lambda = rng.gen_range(0..=7u32);
        if u64::from(b).pow(lambda) > 4000 {
            return Ok(());
        }
        let s = fourier::l2_residue_sum(base(b), lambda, rng.gen(), rng.gen())
            .map_err(|e| e.to_string())?;
        ((s - 1.0).abs() < 1e-10)
            .then_some(())
            .ok_or(format!("b={b} λ={lambda}: Σ|F|² = {s}"))
    });

    rec.run("pointwise G domination", n, |_| {
        let b = *[2u32, 3, 5].choose(&mut rng).unwrap();
        let bf = f64::from(b);
        let lambda = rng.gen_range(1..=10u32);
        let (a, t) = (rng.gen::<f64>(), rng.gen::<f64>());
        let f = fourier::f_abs_product(&FourierPoint::new(base(b), lambda, a, t));
        let ga = fourier::g_product(base(b), lambda - 1, a * (bf * bf - 1.0));
        let gt = fourier::g_product(base(b), lambda - 1, t * (bf * bf - 1.0));
        (f <= ga.sqrt().min(gt.sqrt()) + 1e-12)
            .then_some(())
            .ok_or(format!("b={b} λ={lambda} α={a} ϑ={t}"))
    });

    rec.run("F² theta-continuity", n, |_| {
        let b = *[2u32, 3].choose(&mut rng).unwrap();
        let lambda = rng.gen_range(0..=6u32);
        let (a, t1, t2) = (rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>());
        let f1 = fourier::f_abs_product(&FourierPoint::new(base(b), lambda, a, t1)).powi(2);
        let f2 = fourier::f_abs_product(&FourierPoint::new(base(b), lambda, a, t2)).powi(2);
        let cap = 2.0 * std::f64::consts::PI / 3.0
            * f64::from(b).powi(lambda as i32)
            * torus_norm(t1 - t2);
        ((f1 - f2).abs() <= cap + 1e-12)
            .then_some(())
            .ok_or(format!("b={b} λ={lambda}"))
    });

    rec.results
}

pub fn sieve_suite(seed: u64, size: Size) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x51EE);
    let mut rec = Recorder {
        suite: "sieve",
        results: Vec::new(),
    };
    let n = 4 * size.scale();

    rec.run("fast path equals naive recomputation", n, |_| {
        let (b, lambda) = *[(10u32, 4u32), (2, 12), (3, 8), (6, 5), (5, 6)]
            .choose(&mut rng)
            .unwrap();
        let blk = PrimeBlock::new(base(b), lambda).map_err(|e| e.to_string())?;
        let hi = blk.hi();
        if blk.pi_lambda(hi).unwrap() != naive::pi_lambda(b, lambda, hi) {
            return Err(format!("π mismatch b={b} λ={lambda}"));
        }
        let d = rng.gen_range(2..20u64);
        let a = rng.gen_range(0..d);
        if blk.pimirror(hi, a, d).unwrap() != naive::pimirror(b, lambda, hi, a, d) {
            return Err(format!("π-mirror mismatch b={b} λ={lambda} a={a} d={d}"));
        }
        if blk.bv_statistic(10).unwrap().per_d[usize::try_from(d.min(10) - 2).unwrap_or(0)]
            .sup_num
            != naive::sup_deviation_numerator(b, lambda, d.min(10))
        {
            return Err(format!("bv sup mismatch b={b} λ={lambda} d={}", d.min(10)));
        }
        let rows = blk.census(Some(3), 5).map_err(|e| e.to_string())?;
        let want = naive::census(b, lambda, Some(3), 5);
        (rows == want)
            .then_some(())
            .ok_or(format!("census mismatch b={b} λ={lambda}"))
    });

    rec.run("pimirror partition", 3 * n, |_| {
        let (b, lambda) = *[(10u32, 3u32), (2, 10), (7, 4)].choose(&mut rng).unwrap();
        let blk = PrimeBlock::new(base(b), lambda).map_err(|e| e.to_string())?;
        let d = rng.gen_range(1..40u64);
        let hi = blk.hi();
        let total: u64 = (0..d).map(|a| blk.pimirror(hi, a, d).unwrap()).sum();
        (total == blk.pi_lambda(hi).unwrap())
            .then_some(())
            .ok_or(format!("b={b} λ={lambda} d={d}"))
    });

    rec.run("coprimality of reverses", n, |_| {
        let (b, lambda) = *[(10u32, 4u32), (2, 10), (3, 7)].choose(&mut rng).unwrap();
        let blk = PrimeBlock::new(base(b), lambda).map_err(|e| e.to_string())?;
        let forced = base(b).forced_modulus();
        for (&p, &r) in blk.primes().iter().zip(blk.reverses()) {
            let i = p / blk.lo();
            if gcd(i, u64::from(b)) != 1 {
                continue;
            }
            if gcd(r, forced) != 1 {
                return Err(format!("b={b} λ={lambda} p={p} R={r}"));
            }
        }
        Ok(())
    });

    rec.results
}

pub fn expsums_suite(seed: u64, size: Size) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xE659);
    let mut rec = Recorder {
        suite: "expsums",
        results: Vec::new(),
    };
    let n = 20 * size.scale();

    rec.run("vaughan identity", n, |_| {
        let x = rng.gen_range(500..8000u64);
        let y = rng.gen_range(20..x / 2);
        let u = rng.gen_range(2..y.min(60));
        let alpha = rng.gen::<f64>();
        let chk = expsums::vaughan_identity_check(u, y, x, |m| unit_exp(alpha * m as f64))
            .map_err(|e| e.to_string())?;
        ((chk.lhs - chk.rhs).norm() <= 1e-9 * (x - y) as f64)
            .then_some(())
            .ok_or(format!("u={u} y={y} x={x} α={alpha}"))
    });

    rec.run("fourier expansion identity", n, |_| {
        let b = *[2u32, 3].choose(&mut rng).unwrap();
        let mu2 = if b == 2 { 4 } else { 3 };
        let lambda = mu2 + rng.gen_range(0..4);
        let d = *[3u64, 5, 7].choose(&mut rng).unwrap();
        let angle = RationalAngle::new(rng.gen_range(1..d) as i64, d).unwrap();
        let (m, nn, r) = (
            rng.gen_range(1..60u64),
            rng.gen_range(1..300u64),
            rng.gen_range(0..6u64),
        );
        let (lhs, rhs) =
            expsums::fourier_expansion_check(base(b), lambda, mu2, &angle, m, nn, r)
                .map_err(|e| e.to_string())?;
        ((lhs - rhs).norm() < 1e-9)
            .then_some(())
            .ok_or(format!("b={b} λ={lambda} μ₂={mu2} {angle} m={m} n={nn} r={r}"))
    });

    rec.run("carry-set digit run", 2, |_| {
        let (mu, nu, rho, rho_p) = (2u32, 5u32, 1u32, 2u32);
        let b = *[2u32, 3].choose(&mut rng).unwrap();
        let cs = expsums::carry_set(base(b), mu, nu, rho, rho_p).map_err(|e| e.to_string())?;
        for &(m, nn) in &cs.members {
            if !expsums::has_max_digit_run(base(b), m * nn, mu + rho, rho_p) {
                return Err(format!("b={b} member ({m},{nn})"));
            }
        }
        Ok(())
    });

    rec.run("van der Corput", 10 * n, |_| {
        let len = rng.gen_range(1..60usize);
        let z: Vec<Complex64> = (0..len).map(|_| rng.gen::<f64>() * unit_exp(rng.gen())).collect();
        let out = expsums::van_der_corput(&z, rng.gen_range(1..5), rng.gen_range(1..8));
        out.holds
            .then_some(())
            .ok_or(format!("N={len}: lhs={} rhs={}", out.lhs, out.rhs))
    });

    rec.run("inverse-sinus sum", 10 * n, |_| {
        let m = rng.gen_range(1..150u64);
        let a = rng.gen_range(-80..80i64);
        let out = expsums::sum_inverse_sinus(
            a,
            m,
            rng.gen::<f64>() * 8.0 - 4.0,
            rng.gen_range(-40..40),
            rng.gen_range(1..200u64),
            rng.gen_range(1.0..1e5),
        );
        out.holds
            .then_some(())
            .ok_or(format!("a={a} m={m}: lhs={} rhs={}", out.lhs, out.rhs))
    });

    rec.run("gcd sum", 10 * n, |_| {
        let m = rng.gen_range(1..3000u64);
        let a = rng.gen_range(1.0..1500.0);
        let out = expsums::gcd_sum(m, a);
        out.holds
            .then_some(())
            .ok_or(format!("m={m} A={a}: lhs={} rhs={}", out.lhs, out.rhs))
    });

    rec.run("sigma bounds", 10 * n, |_| {
        let b = rng.gen_range(2..30u32);
        let lambda = rng.gen_range(1..12u32);
        let z = *[-2.0, -0.5, 0.0, 0.7, 1.5].choose(&mut rng).unwrap();
        let out = expsums::sigma_bounds(base(b), lambda, z);
        out.holds
            .then_some(())
            .ok_or(format!("b={b} λ={lambda} z={z}: lhs={} rhs={}", out.lhs, out.rhs))
    });

    rec.results
}

pub fn run_suite(name: &str, seed: u64, size: Size) -> Option<Vec<CheckResult>> {
    match name {
        "digits" => Some(digits_suite(seed, size)),
        "kernel" => Some(kernel_suite(seed, size)),
        "fourier" => Some(fourier_suite(seed, size)),
        "sieve" => Some(sieve_suite(seed, size)),
        "expsums" => Some(expsums_suite(seed, size)),
        "all" => {
            let mut all = digits_suite(seed, size);
            all.extend(kernel_suite(seed, size));
            all.extend(fourier_suite(seed, size));
            all.extend(sieve_suite(seed, size));
            all.extend(expsums_suite(seed, size));
            Some(all)
        }
        _ => None,
    }
}
