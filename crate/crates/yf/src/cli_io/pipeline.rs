//! Stage-by-stage orchestration with cached, byte-reproducible artifacts.
//!
//! Each stage renders a JSON string from its inputs; later stages parse their
//! predecessors from that string, so a warm cache skips the computation and a cold
//! one goes through the same decoding path.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::brandt::{brandt_matrices, eigensystems, essential_part, AutomorphicVector, EigenSystem};
use crate::congruence::{compositum, congruence_prime_detector, scan, EigenTable, Weight};
use crate::exact_core::rational::{factorize_u64, is_prime_u64, is_squarefree_u64, Rational};
use crate::exact_core::{NfElem, NumberField, Ring};
use crate::quatlat::{build_algebra, build_order, class_set, IdealClassSet};
use crate::waldspurger::{averaged_coefficient, factorization_check, waldspurger_lift};
use crate::yoshida::norms::canonical_scale;
use crate::yoshida::{verify_eigen, SiegelCoeffTable, YoshidaLift};
use crate::Error;

use super::cache::{sha256_hex, write_atomic, Cache, SCHEMA};
use super::records::*;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub n1: u64,
    pub n2: u64,
    pub nu1: u32,
    pub nu2: u32,
    pub lift_bound: i64,
    pub q_bound: u64,
    pub probe_primes: Vec<u64>,
    pub discriminants: Vec<u64>,
    /// Eigensystem labels; by default the system of largest degree.
    pub f_label: Option<String>,
    pub g_label: Option<String>,
    pub cache_dir: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(n1: u64, n2: u64, nu1: u32, nu2: u32, lift_bound: i64) -> Self {
        RunConfig {
            n1,
            n2,
            nu1,
            nu2,
            lift_bound,
            q_bound: 4 * lift_bound as u64,
            probe_primes: vec![2, 3, 5, 7],
            discriminants: vec![4],
            f_label: None,
            g_label: None,
            cache_dir: None,
            out_dir: None,
        }
    }

    pub fn level(&self) -> u64 {
        self.n1 * self.n2
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.n1 < 2 || !is_squarefree_u64(self.n1) || factorize_u64(self.n1).len().is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "n1 = {} must be squarefree with an odd number of prime factors",
                self.n1
            )));
        }
        if self.n2 < 1 || !is_squarefree_u64(self.n2) {
            return Err(Error::Domain(format!("n2 = {} must be squarefree", self.n2)));
        }
        if num_integer::gcd(self.n1, self.n2) != 1 {
            return Err(Error::Domain(format!("gcd(n1, n2) = {} must be 1", num_integer::gcd(self.n1, self.n2))));
        }
        if self.nu1 < self.nu2 {
            return Err(Error::Domain(format!("need nu1 ≥ nu2, got ({}, {})", self.nu1, self.nu2)));
        }
        if self.lift_bound < 2 {
            return Err(Error::Domain("the lift trace bound must be at least 2".into()));
        }
        if self.q_bound < 1 {
            return Err(Error::Domain("the q-expansion bound must be positive".into()));
        }
        if self.probe_primes.is_empty() || self.probe_primes.iter().any(|&p| !is_prime_u64(p)) {
            return Err(Error::Domain(format!(
                "probe primes must be a nonempty list of primes, got {:?}",
                self.probe_primes
            )));
        }
        if self.probe_primes.iter().all(|p| self.level().is_multiple_of(*p)) {
            return Err(Error::Domain("every probe prime divides the level".into()));
        }
        Ok(())
    }

    /// The config as recorded in the manifest; directories are not part of it.
    pub fn record(&self) -> serde_json::Value {
        json!({
            "n1": s(self.n1), "n2": s(self.n2), "nu1": s(self.nu1), "nu2": s(self.nu2),
            "lift_bound": s(self.lift_bound), "q_bound": s(self.q_bound),
            "probe_primes": self.probe_primes.iter().map(s).collect::<Vec<_>>(),
            "discriminants": self.discriminants.iter().map(s).collect::<Vec<_>>(),
            "f_label": self.f_label, "g_label": self.g_label,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageOutcome {
    pub stage: String,
    pub file: String,
    pub cached: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactRec {
    pub file: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRec {
    pub schema: String,
    pub config: serde_json::Value,
    pub artifacts: Vec<ArtifactRec>,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug)]
pub struct PipelineOutcome {
    pub stages: Vec<StageOutcome>,
    pub checks: Vec<Check>,
    /// file name ↦ bytes, manifest included
    pub artifacts: BTreeMap<String, String>,
}

impl PipelineOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaldStageRec {
    pub f: WaldRec,
    pub g: WaldRec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanStageRec {
    pub predicted: EigenTableRec,
    pub genus2: EigenTableRec,
    pub lift_vs_hecke: ScanRec,
    pub congruence_primes_f: Vec<String>,
}

/// Prefixes the message with the stage name, keeping the kind.
pub fn in_stage(stage: &str, e: Error) -> Error {
    let tag = |m: String| format!("[{}] {}", stage, m);
    match e {
        Error::Domain(m) => Error::Domain(tag(m)),
        Error::SearchBound(m) => Error::SearchBound(tag(m)),
        Error::Invariant(m) => Error::Invariant(tag(m)),
        Error::ExcludedWeight(m) => Error::ExcludedWeight(tag(m)),
        Error::Truncation(m) => Error::Truncation(tag(m)),
        Error::NotEigenform(m) => Error::NotEigenform(tag(m)),
        Error::Io(e) => Error::Io(std::io::Error::new(e.kind(), tag(e.to_string()))),
        Error::Format(m) => Error::Format(tag(m)),
    }
}

pub struct Session {
    pub cfg: RunConfig,
    cache: Cache,
    cs: Option<IdealClassSet>,
    pub stages: Vec<StageOutcome>,
    pub artifacts: BTreeMap<String, String>,
    memo: BTreeMap<String, String>,
}

impl Session {
    pub fn new(cfg: RunConfig) -> Result<Self, Error> {
        cfg.validate()?;
        let cache = Cache::new(cfg.cache_dir.clone());
        Ok(Session {
            cfg,
            cache,
            cs: None,
            stages: Vec::new(),
            artifacts: BTreeMap::new(),
            memo: BTreeMap::new(),
        })
    }

    fn class_set(&mut self) -> Result<&IdealClassSet, Error> {
        if self.cs.is_none() {
            let alg = build_algebra(self.cfg.n1)?;
            self.cs = Some(class_set(&build_order(&alg, self.cfg.n2)?)?);
        }
        Ok(self.cs.as_ref().unwrap())
    }

    fn stage(&mut self, stage: &str, file: &str, subset: serde_json::Value, compute: impl FnOnce(&mut Self) -> Result<String, Error>) -> Result<String, Error> {
        let key = Cache::key(stage, &subset);
        if let Some(c) = self.memo.get(&key) {
            return Ok(c.clone());
        }
        let (content, cached) = match self.cache.load(stage, &key) {
            Some(c) => (c, true),
            None => {
                let c = compute(self).map_err(|e| in_stage(stage, e))?;
                self.cache.store(stage, &key, &c).map_err(|e| in_stage(stage, e))?;
                (c, false)
            }
        };
        if let Some(dir) = &self.cfg.out_dir {
            write_atomic(&dir.join(file), content.as_bytes()).map_err(|e| in_stage(stage, e))?;
        }
        self.stages.push(StageOutcome {
            stage: stage.into(),
            file: file.into(),
            cached,
        });
        self.artifacts.insert(file.into(), content.clone());
        self.memo.insert(key, content.clone());
        Ok(content)
    }

    fn base(&self) -> serde_json::Value {
        json!({ "n1": s(self.cfg.n1), "n2": s(self.cfg.n2) })
    }

    pub fn classset(&mut self) -> Result<ClassSetRec, Error> {
        let text = self.stage("classset", "classset.json", self.base(), |me| Ok(to_json(&class_set_rec(me.class_set()?))))?;
        from_json(&text)
    }

    fn primes_subset(&self, nu: u32) -> serde_json::Value {
        json!({ "base": self.base(), "nu": s(nu), "primes": self.cfg.probe_primes.iter().map(s).collect::<Vec<_>>() })
    }

    pub fn brandt(&mut self, nu: u32) -> Result<BrandtRec, Error> {
        let primes = self.cfg.probe_primes.clone();
        let level = self.cfg.level();
        let file = format!("brandt_nu{}.json", nu);
        let text = self.stage("brandt", &file, self.primes_subset(nu), move |me| {
            let ms = brandt_matrices(me.class_set()?, nu, &primes)?;
            Ok(to_json(&brandt_rec(level, nu, &ms)))
        })?;
        from_json(&text)
    }

    pub fn eigen(&mut self, nu: u32) -> Result<Vec<EigenSystem>, Error> {
        let brandt = self.brandt(nu)?;
        let level = self.cfg.level();
        let file = format!("eigen_nu{}.json", nu);
        let text = self.stage("eigen", &file, self.primes_subset(nu), move |me| {
            let ms = brandt_of(&brandt)?;
            let ess = essential_part(me.class_set()?, nu)?;
            let systems = eigensystems(&ms, &ess, level)?;
            Ok(to_json(&EigenRec {
                level: s(level),
                nu: s(nu),
                systems: systems.iter().map(|e| eigen_system_rec(e, level)).collect(),
            }))
        })?;
        let rec: EigenRec = from_json(&text)?;
        rec.systems.iter().map(eigen_system_of).collect()
    }

    fn pick(systems: &[EigenSystem], label: &Option<String>, avoid: Option<&str>) -> Result<EigenSystem, Error> {
        if let Some(l) = label {
            return systems
                .iter()
                .find(|e| &e.label == l)
                .cloned()
                .ok_or_else(|| Error::Domain(format!("no eigensystem labelled {}", l)));
        }
        let mut best: Option<&EigenSystem> = None;
        for e in systems.iter().filter(|e| Some(e.label.as_str()) != avoid) {
            if best.map(|b| e.degree() > b.degree()).unwrap_or(true) {
                best = Some(e);
            }
        }
        best.cloned().ok_or_else(|| Error::Domain("the essential part has no eigensystem".into()))
    }

    /// (f, g) at (ν₁, ν₂).
    pub fn inputs(&mut self) -> Result<(EigenSystem, EigenSystem), Error> {
        let (nu1, nu2) = (self.cfg.nu1, self.cfg.nu2);
        let f = Self::pick(&self.eigen(nu1)?, &self.cfg.f_label, None)?;
        let avoid = if nu1 == nu2 { Some(f.label.clone()) } else { None };
        let g = Self::pick(&self.eigen(nu2)?, &self.cfg.g_label, avoid.as_deref())?;
        if f.label == g.label {
            return Err(Error::Domain("f and g must be different eigensystems".into()));
        }
        Ok((f, g))
    }

    fn phis(f: &EigenSystem, g: &EigenSystem) -> (AutomorphicVector<NfElem>, AutomorphicVector<NfElem>) {
        (AutomorphicVector::from_flat(f.nu, &f.vector), AutomorphicVector::from_flat(g.nu, &g.vector))
    }

    fn lift_subset(&self, f: &EigenSystem, g: &EigenSystem) -> serde_json::Value {
        json!({
            "base": self.base(), "nu1": s(self.cfg.nu1), "nu2": s(self.cfg.nu2),
            "f": f.label, "g": g.label, "bound": s(self.cfg.lift_bound),
            "primes": self.cfg.probe_primes.iter().map(s).collect::<Vec<_>>(),
        })
    }

    /// The bilinear lift Y(φ₁, φ₂) and the canonically normalized one.
    pub fn lift(&mut self) -> Result<(SiegelCoeffTable, SiegelCoeffTable), Error> {
        let (f, g) = self.inputs()?;
        let bound = self.cfg.lift_bound;
        let sub = self.lift_subset(&f, &g);
        let (pf, pg) = Self::phis(&f, &g);
        let (pf2, pg2) = (pf.clone(), pg.clone());
        let raw_text = self.stage("lift", "lift.json", sub.clone(), move |me| {
            let t = YoshidaLift::new(me.class_set()?, &pf, &pg, bound)?.table(bound)?;
            Ok(to_json(&siegel_rec(&t)))
        })?;
        let raw = siegel_of(&from_json(&raw_text)?)?;
        let raw2 = raw.clone();
        let can_text = self.stage("lift_can", "lift_can.json", sub, move |me| {
            let c = canonical_scale(&raw2, me.class_set()?, &pf2, &pg2)?;
            Ok(to_json(&siegel_rec(&c)))
        })?;
        Ok((raw, siegel_of(&from_json(&can_text)?)?))
    }

    /// a_p(f) + p^{ν₁−ν₂} a_p(g) in a common field.
    pub fn predicted_table(f: &EigenSystem, g: &EigenSystem, level: u64) -> Result<EigenTable, Error> {
        let c = compositum(&f.field, &g.field)?;
        let e = f.nu - g.nu;
        let mut entries = BTreeMap::new();
        for (p, a) in &f.eigenvalues {
            if level.is_multiple_of(*p) {
                continue;
            }
            let Some(b) = g.eigenvalues.get(p) else { continue };
            let w = Rational::from_integer(num_bigint::BigInt::from(*p).pow(e));
            entries.insert(*p, c.map_k(a).radd(&c.map_l(b).rscale(&w)));
        }
        let weight = Weight::Siegel {
            j: 2 * g.nu,
            kappa: f.nu - g.nu + 2,
        };
        EigenTable::new(&format!("Y({}, {})", f.label, g.label), weight, level, c.field, entries)
    }

    pub fn hecke(&mut self) -> Result<Vec<HeckeRec>, Error> {
        let (f, g) = self.inputs()?;
        let (raw, _) = self.lift()?;
        let level = self.cfg.level();
        let sub = self.lift_subset(&f, &g);
        // T(p) is certified up to trace ⌊B/p⌋, which must reach a nonzero coefficient
        let first = raw.nonzero_keys().iter().map(|t| t[0] + t[2]).min().unwrap_or(i64::MAX);
        let primes: Vec<u64> = self
            .cfg
            .probe_primes
            .iter()
            .copied()
            .filter(|p| !level.is_multiple_of(*p) && raw.bound / *p as i64 >= first)
            .collect();
        let text = self.stage("hecke", "hecke.json", sub, move |_| {
            let pred = Self::predicted_table(&f, &g, level)?;
            let k = table_field(&raw).or(pred.field.clone());
            if primes.is_empty() {
                return Err(Error::Truncation(format!("no probe prime p has ⌊{}/p⌋ ≥ {}", raw.bound, first)));
            }
            let mut recs = Vec::new();
            for p in primes {
                let out = raw.bound / p as i64;
                let cert = verify_eigen(&raw, p, out)?;
                let want = pred
                    .entries
                    .get(&p)
                    .cloned()
                    .ok_or_else(|| Error::Domain(format!("no eigenvalue at p = {}", p)))?;
                recs.push(hecke_rec(&cert, out, &want, &k));
            }
            Ok(to_json(&recs))
        })?;
        from_json(&text)
    }

    pub fn wald(&mut self) -> Result<WaldStageRec, Error> {
        let (f, g) = self.inputs()?;
        let qb = self.cfg.q_bound;
        let sub = json!({ "lift": self.lift_subset(&f, &g), "q_bound": s(qb) });
        let text = self.stage("wald", "wald.json", sub, move |me| {
            let (pf, pg) = Self::phis(&f, &g);
            let cs = me.class_set()?;
            let (wf, wg) = (waldspurger_lift(cs, &pf, qb)?, waldspurger_lift(cs, &pg, qb)?);
            Ok(to_json(&WaldStageRec {
                f: wald_rec(&f.label, &wf, &f.field),
                g: wald_rec(&g.label, &wg, &g.field),
            }))
        })?;
        from_json(&text)
    }

    fn disc_subset(&self, f: &EigenSystem, g: &EigenSystem) -> serde_json::Value {
        json!({ "lift": self.lift_subset(f, g), "d": self.cfg.discriminants.iter().map(s).collect::<Vec<_>>() })
    }

    pub fn avg(&mut self) -> Result<Vec<AvgRec>, Error> {
        let (f, g) = self.inputs()?;
        let (raw, _) = self.lift()?;
        let ds = self.cfg.discriminants.clone();
        let sub = self.disc_subset(&f, &g);
        let text = self.stage("avg", "avg.json", sub, move |_| {
            let k = table_field(&raw);
            let recs = ds
                .iter()
                .map(|&d| Ok(avg_rec(&averaged_coefficient(&raw, d)?, &k)))
                .collect::<Result<Vec<_>, Error>>()?;
            Ok(to_json(&recs))
        })?;
        from_json(&text)
    }

    /// The identity is checked on the bilinear lift Y(φ₁, φ₂).
    pub fn factorization(&mut self) -> Result<Vec<FactorizationRec>, Error> {
        let (f, g) = self.inputs()?;
        let (raw, _) = self.lift()?;
        let ds = self.cfg.discriminants.clone();
        let sub = self.disc_subset(&f, &g);
        let text = self.stage("factorization", "factorization.json", sub, move |me| {
            let (pf, pg) = Self::phis(&f, &g);
            let cs = me.class_set()?;
            let k = table_field(&raw).or(f.field.clone()).or(g.field.clone());
            let recs = ds
                .iter()
                .map(|&d| Ok(factorization_rec(&factorization_check(&raw, cs, &pf, &pg, d)?, &k)))
                .collect::<Result<Vec<_>, Error>>()?;
            Ok(to_json(&recs))
        })?;
        from_json(&text)
    }

    pub fn scan_stage(&mut self) -> Result<ScanStageRec, Error> {
        let (f, g) = self.inputs()?;
        let hecke = self.hecke()?;
        let space = self.eigen(self.cfg.nu1)?;
        let level = self.cfg.level();
        let primes = self.cfg.probe_primes.clone();
        let sub = json!({ "lift": self.lift_subset(&f, &g), "space": space.iter().map(|e| e.label.clone()).collect::<Vec<_>>() });
        let text = self.stage("scan", "scan.json", sub, move |_| {
            let hp: Vec<u64> = hecke.iter().map(|h| parse_int(&h.p)).collect::<Result<_, _>>()?;
            let mut pred = Self::predicted_table(&f, &g, level)?;
            pred.entries.retain(|p, _| hp.contains(p));
            let k = field_of(&hecke.first().and_then(|h| h.field.clone()))?;
            let mut entries = BTreeMap::new();
            for h in &hecke {
                entries.insert(parse_int(&h.p)?, elem(&h.eigenvalue, &k)?);
            }
            let g2 = EigenTable::new("F|T(p)", pred.weight, level, k, entries)?;
            let report = scan(&pred, &g2, &hp)?;
            let tables = space.iter().map(|e| EigenTable::from_system(e, level)).collect::<Result<Vec<_>, _>>()?;
            let ft = EigenTable::from_system(&f, level)?;
            let cong = congruence_prime_detector(&tables, &ft, &primes)?;
            Ok(to_json(&ScanStageRec {
                predicted: eigen_table_rec(&pred),
                genus2: eigen_table_rec(&g2),
                lift_vs_hecke: scan_rec(&report),
                congruence_primes_f: cong.iter().map(s).collect(),
            }))
        })?;
        from_json(&text)
    }
}

fn field_degree(k: &Option<Arc<NumberField>>) -> usize {
    k.as_ref().map(|k| k.degree()).unwrap_or(1)
}

/// classset → brandt/eigen → lift → hecke → wald/avg → factorization → scan → manifest.
pub fn run_pipeline(cfg: RunConfig) -> Result<PipelineOutcome, Error> {
    let mut se = Session::new(cfg)?;
    let mut checks = Vec::new();
    let cs = se.classset()?;
    checks.push(Check {
        name: "class set".into(),
        passed: true,
        detail: format!("h = {}, mass = {}", cs.h, cs.mass),
    });
    let (f, g) = se.inputs()?;
    checks.push(Check {
        name: "inputs".into(),
        passed: true,
        detail: format!(
            "f = {} (degree {}), g = {} (degree {})",
            f.label,
            field_degree(&f.field),
            g.label,
            field_degree(&g.field)
        ),
    });
    let (raw, _) = se.lift()?;
    checks.push(Check {
        name: "lift nonzero".into(),
        passed: !raw.is_zero(),
        detail: format!("{} nonzero keys", raw.nonzero_keys().len()),
    });
    checks.push(Check {
        name: "lift cuspidal".into(),
        passed: raw.is_cuspidal(),
        detail: "singular coefficients vanish".into(),
    });
    for h in se.hecke()? {
        checks.push(Check {
            name: format!("T({}) eigenvalue", h.p),
            passed: h.agrees,
            detail: format!("checked {} keys up to trace {}", h.checked.len(), h.out_bound),
        });
    }
    se.wald()?;
    se.avg()?;
    for r in se.factorization()? {
        checks.push(Check {
            name: format!("factorization d = {}", r.d),
            passed: r.equal,
            detail: format!("lhs {} ; rhs {}", r.lhs.display, r.rhs.display),
        });
    }
    let sc = se.scan_stage()?;
    checks.push(Check {
        name: "scan lift vs Hecke".into(),
        passed: sc.lift_vs_hecke.exact,
        detail: format!("modulus {}", sc.lift_vs_hecke.modulus),
    });
    let manifest = ManifestRec {
        schema: SCHEMA.into(),
        config: se.cfg.record(),
        artifacts: se
            .artifacts
            .iter()
            .map(|(file, c)| ArtifactRec {
                file: file.clone(),
                sha256: sha256_hex(c.as_bytes()),
            })
            .collect(),
        checks: checks.clone(),
    };
    let text = to_json(&manifest);
    if let Some(dir) = &se.cfg.out_dir {
        write_atomic(&dir.join("manifest.json"), text.as_bytes()).map_err(|e| in_stage("manifest", e))?;
    }
    se.artifacts.insert("manifest.json".into(), text);
    Ok(PipelineOutcome {
        stages: se.stages,
        checks,
        artifacts: se.artifacts,
    })
}

/// run_pipeline inside a dedicated pool of `threads` workers.
pub fn run_pipeline_with_threads(cfg: RunConfig, threads: usize) -> Result<PipelineOutcome, Error> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Domain(e.to_string()))?;
    pool.install(|| run_pipeline(cfg))
}
