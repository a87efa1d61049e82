//! Synthetic citation worlds with controllable field structure, reference
//! lengths, publication growth and cross-field traffic, plus oracles for
//! checking indicator behaviour on them.
//!
//! A world is generated as ordinary journal and publication records and then
//! ingested, so it flows through exactly the same code as real data.

mod bias;
mod oracle;

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{
    ingest_records, Corpus, IngestConfig, JournalId, JournalRecord, PublicationRecord, Year,
    CITED_WINDOW_YEARS,
};
use crate::error::{Error, Result};

pub use bias::{bias_experiment, bias_report, BiasField, BiasReport, Expectation, ModeBias};
pub use oracle::{brute_force_snip, mu_per_field, FieldMu, FieldMuDocument};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub fields: Vec<FieldSpec>,
    pub year_of_analysis: Year,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    /// Used in journal ids and reports; defaults to `F<index>`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n_cited_journals: u32,
    /// Only meaningful with `split_citing_cited`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_citing_journals: Option<u32>,
    /// When set, cited journals publish only in the cited window and
    /// separate citing journals publish only in the year of analysis.
    #[serde(default)]
    pub split_citing_cited: bool,
    pub pubs_per_journal_per_year: PubsPerYear,
    pub ref_count_distribution: RefCountDistribution,
    /// Probability that an active reference points into another field.
    #[serde(default)]
    pub cross_field_fraction: f64,
    /// Publication counts are multiplied by `growth_factor^k` in the k-th
    /// year counted from the start of the cited window.
    #[serde(default = "unit_growth")]
    pub growth_factor: f64,
    /// Extra references outside the database added to every citing
    /// publication; they change only the total reference count.
    #[serde(default)]
    pub inactive_refs: u32,
    /// Permits a journal whose year-of-analysis publications all lack active
    /// references.
    #[serde(default)]
    pub allow_inactive_journals: bool,
}

fn unit_growth() -> f64 {
    1.0
}

/// Publications per journal per year, before growth is applied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PubsPerYear {
    Count(u32),
    /// One count for each cited-window year followed by the year of analysis.
    PerYear([u32; 4]),
    /// Drawn once per journal and used for every year.
    Range { min: u32, max: u32 },
}

/// Active references per year-of-analysis publication. Mass at 0 sets the
/// share of publications without active references.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RefCountDistribution {
    Constant { r: u32 },
    Uniform { min: u32, max: u32 },
    Weighted { weights: Vec<(u32, f64)> },
}

impl RefCountDistribution {
    fn validate(&self) -> Result<()> {
        match self {
            RefCountDistribution::Uniform { min, max } if min > max => Err(infeasible(format!(
                "uniform reference counts need min <= max, got {min} > {max}"
            ))),
            RefCountDistribution::Weighted { weights } => {
                if weights.iter().any(|&(_, w)| !w.is_finite() || w < 0.0) {
                    return Err(infeasible("reference-count weights must be finite and non-negative"));
                }
                if weights.iter().all(|&(_, w)| w == 0.0) {
                    return Err(infeasible("reference-count weights are all zero"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Probability of a publication having no active reference.
    pub fn zero_share(&self) -> f64 {
        match *self {
            RefCountDistribution::Constant { r } => f64::from(u8::from(r == 0)),
            RefCountDistribution::Uniform { min, max } => {
                if min == 0 {
                    1.0 / f64::from(max - min + 1)
                } else {
                    0.0
                }
            }
            RefCountDistribution::Weighted { ref weights } => {
                let total: f64 = weights.iter().map(|w| w.1).sum();
                weights.iter().filter(|w| w.0 == 0).map(|w| w.1).sum::<f64>() / total
            }
        }
    }

    /// Sampler for the distribution conditioned on `r >= 1`; `None` when it
    /// has no positive mass.
    fn positive(&self) -> Option<PositiveSampler> {
        match *self {
            RefCountDistribution::Constant { r } => (r > 0).then_some(PositiveSampler::Constant(r)),
            RefCountDistribution::Uniform { min, max } => {
                (max > 0).then_some(PositiveSampler::Uniform(min.max(1), max))
            }
            RefCountDistribution::Weighted { ref weights } => {
                let positive: Vec<_> = weights.iter().filter(|w| w.0 > 0 && w.1 > 0.0).collect();
                let dist = WeightedIndex::new(positive.iter().map(|w| w.1)).ok()?;
                Some(PositiveSampler::Weighted(positive.iter().map(|w| w.0).collect(), dist))
            }
        }
    }
}

enum PositiveSampler {
    Constant(u32),
    Uniform(u32, u32),
    Weighted(Vec<u32>, WeightedIndex<f64>),
}

impl PositiveSampler {
    fn sample(&self, rng: &mut impl Rng) -> u32 {
        match self {
            PositiveSampler::Constant(r) => *r,
            PositiveSampler::Uniform(lo, hi) => rng.random_range(*lo..=*hi),
            PositiveSampler::Weighted(values, dist) => values[dist.sample(rng)],
        }
    }
}

fn infeasible(msg: impl Into<String>) -> Error {
    Error::InfeasibleSpec(msg.into())
}

impl FieldSpec {
    pub fn display_name(&self, index: usize) -> String {
        self.name.clone().unwrap_or_else(|| format!("F{index}"))
    }

    fn validate(&self, index: usize, n_fields: usize) -> Result<()> {
        let name = self.display_name(index);
        if self.n_cited_journals == 0 {
            return Err(infeasible(format!("field {name} has no cited journals")));
        }
        match (self.split_citing_cited, self.n_citing_journals) {
            (true, None | Some(0)) => {
                return Err(infeasible(format!("field {name} is split but has no citing journals")))
            }
            (false, Some(n)) if n != self.n_cited_journals => {
                return Err(infeasible(format!(
                    "field {name}: citing and cited journals coincide, so n_citing_journals must equal n_cited_journals"
                )))
            }
            _ => {}
        }
        if let PubsPerYear::Range { min, max } = self.pubs_per_journal_per_year {
            if min > max {
                return Err(infeasible(format!("field {name}: publication range min > max")));
            }
        }
        if !(0.0..=1.0).contains(&self.cross_field_fraction) {
            return Err(infeasible(format!(
                "field {name}: cross_field_fraction must lie in [0, 1]"
            )));
        }
        if self.cross_field_fraction > 0.0 && n_fields < 2 {
            return Err(infeasible(format!(
                "field {name} sends references to other fields but there are none"
            )));
        }
        if !(self.growth_factor.is_finite() && self.growth_factor > 0.0) {
            return Err(infeasible(format!("field {name}: growth_factor must be positive")));
        }
        if name.is_empty() || name.contains([',', '"', '\n']) {
            return Err(infeasible(format!("field name `{name}` is not usable in ids")));
        }
        self.ref_count_distribution.validate()
    }

    /// Per-year counts for one journal, cited-window years first.
    fn yearly_counts(&self, rng: &mut impl Rng) -> [u32; 4] {
        let base = match self.pubs_per_journal_per_year {
            PubsPerYear::Count(n) => [n; 4],
            PubsPerYear::PerYear(years) => years,
            PubsPerYear::Range { min, max } => [rng.random_range(min..=max); 4],
        };
        let mut out = base;
        for (k, c) in out.iter_mut().enumerate() {
            *c = (f64::from(*c) * self.growth_factor.powi(k as i32)).round() as u32;
        }
        out
    }
}

/// A generated world: the ingested corpus, the records it came from and the
/// field of every journal.
#[derive(Clone, Debug)]
pub struct SynthWorld {
    pub spec: SynthSpec,
    pub corpus: Corpus,
    pub journals: Vec<JournalRecord>,
    pub publications: Vec<PublicationRecord>,
    pub field_of: BTreeMap<JournalId, usize>,
}

impl SynthWorld {
    pub fn field_names(&self) -> Vec<String> {
        self.spec
            .fields
            .iter()
            .enumerate()
            .map(|(i, f)| f.display_name(i))
            .collect()
    }
}

struct FieldJournals {
    /// (journal id, counts per year) for journals publishing in the window.
    cited: Vec<(String, [u32; 4])>,
    /// (journal id, year-of-analysis count) for journals that cite.
    citing: Vec<(String, u32)>,
}

/// Builds a world from `spec`; the same spec always yields the same corpus.
pub fn generate(spec: &SynthSpec) -> Result<SynthWorld> {
    if spec.fields.is_empty() {
        return Err(infeasible("a world needs at least one field"));
    }
    let n_fields = spec.fields.len();
    for (i, f) in spec.fields.iter().enumerate() {
        f.validate(i, n_fields)?;
    }
    let names: Vec<String> = spec.fields.iter().enumerate().map(|(i, f)| f.display_name(i)).collect();
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(infeasible(format!("field name `{n}` is used twice")));
        }
    }

    let y = spec.year_of_analysis;
    let first = y - CITED_WINDOW_YEARS;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut journals = Vec::new();
    let mut field_of = BTreeMap::new();

    let layout: Vec<FieldJournals> = spec
        .fields
        .iter()
        .zip(&names)
        .map(|(f, name)| {
            let mut fj = FieldJournals {
                cited: Vec::new(),
                citing: Vec::new(),
            };
            for k in 0..f.n_cited_journals {
                let counts = f.yearly_counts(&mut rng);
                if f.split_citing_cited {
                    fj.cited.push((format!("{name}-cited-{k:04}"), counts));
                } else {
                    let id = format!("{name}-J{k:04}");
                    fj.citing.push((id.clone(), counts[3]));
                    fj.cited.push((id, counts));
                }
            }
            for k in 0..f.n_citing_journals.filter(|_| f.split_citing_cited).unwrap_or(0) {
                let counts = f.yearly_counts(&mut rng);
                fj.citing.push((format!("{name}-citing-{k:04}"), counts[3]));
            }
            fj
        })
        .collect();

    for (fi, fj) in layout.iter().enumerate() {
        let ids = fj.cited.iter().map(|c| &c.0).chain(fj.citing.iter().map(|c| &c.0));
        for id in ids {
            if field_of.insert(JournalId::from(id.as_str()), fi).is_none() {
                journals.push(JournalRecord {
                    journal_id: id.clone(),
                    title: id.clone(),
                    is_trade: false,
                });
            }
        }
    }

    let mut publications = Vec::new();
    let mut pub_record = |journal: &str, year: Year, seq: u32, references: Vec<String>| {
        let id = format!("{journal}-{year}-{seq:05}");
        publications.push(PublicationRecord {
            pub_id: id.clone(),
            journal_id: journal.to_owned(),
            year,
            doc_type: "article".to_owned(),
            references,
            refs_missing: false,
        });
        id
    };

    // window publications carry one reference outside the database
    let mut pools: Vec<Vec<String>> = Vec::with_capacity(n_fields);
    for fj in &layout {
        let mut pool = Vec::new();
        for (id, counts) in &fj.cited {
            for (k, &count) in counts[..3].iter().enumerate() {
                let year = first + k as Year;
                for s in 0..count {
                    let pid = format!("{id}-{year}-{s:05}");
                    pool.push(pub_record(id, year, s, vec![format!("external:{pid}")]));
                }
            }
        }
        pools.push(pool);
    }

    for (fi, (f, fj)) in spec.fields.iter().zip(&layout).enumerate() {
        let sampler = f.ref_count_distribution.positive();
        let zero_share = f.ref_count_distribution.zero_share();
        let own_pool = &pools[fi];
        let other_pool: Vec<&String> = pools
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != fi)
            .flat_map(|(_, p)| p.iter())
            .collect();
        for (id, count) in &fj.citing {
            let count = *count;
            let mut zero = (zero_share * f64::from(count)).round() as u32;
            if !f.allow_inactive_journals && count > 0 && zero == count {
                zero = count - 1;
            }
            if zero < count && sampler.is_none() {
                return Err(infeasible(format!(
                    "field {}: journal {id} needs publications with active references but the distribution has no positive mass",
                    names[fi]
                )));
            }
            for s in 0..count {
                let pid = format!("{id}-{y}-{s:05}");
                let mut refs = Vec::new();
                if s >= zero {
                    let r = sampler.as_ref().expect("checked above").sample(&mut rng) as usize;
                    let cross = (0..r)
                        .filter(|_| f.cross_field_fraction > 0.0 && rng.random_bool(f.cross_field_fraction))
                        .count();
                    let own = r - cross;
                    if own > own_pool.len() || cross > other_pool.len() {
                        return Err(infeasible(format!(
                            "field {}: a publication needs {own} in-field and {cross} cross-field targets, \
                             but only {} and {} window publications exist",
                            names[fi],
                            own_pool.len(),
                            other_pool.len()
                        )));
                    }
                    refs.extend(index::sample(&mut rng, own_pool.len(), own).iter().map(|i| own_pool[i].clone()));
                    refs.extend(
                        index::sample(&mut rng, other_pool.len(), cross).iter().map(|i| other_pool[i].clone()),
                    );
                    refs.extend((0..f.inactive_refs).map(|k| format!("external:{pid}:{k}")));
                } else {
                    refs.extend((0..f.inactive_refs.max(1)).map(|k| format!("external:{pid}:{k}")));
                }
                pub_record(id, y, s, refs);
            }
        }
    }

    let (corpus, _) = ingest_records(journals.clone(), publications.clone(), &IngestConfig::new(y))?;
    Ok(SynthWorld {
        spec: spec.clone(),
        corpus,
        journals,
        publications,
        field_of,
    })
}
