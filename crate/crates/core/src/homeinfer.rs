//! Home-country inference from per-country user activity.
//!
//! A user's home is the country holding strictly more of their media objects
//! than any other country AND strictly more distinct active days. If the two
//! maxima point at different countries, or either maximum is tied, the home
//! is undefined.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::geoassign::{AssignedRecord, RegionSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CountryActivity {
    pub object_count: u64,
    /// Distinct UTC calendar dates with at least one object.
    pub active_days: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserProfile {
    pub user_id: String,
    pub per_country: BTreeMap<String, CountryActivity>,
}

impl UserProfile {
    pub fn total_objects(&self) -> u64 {
        self.per_country.values().map(|a| a.object_count).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomeAssignment {
    pub user_id: String,
    pub home_country: Option<String>,
}

/// user_id → home country (`None` = undefined).
pub type Homes = BTreeMap<String, Option<String>>;

/// Partial per-user activity. Merging two accumulators built over disjoint
/// slices of the input gives the same result as one pass over all of it.
#[derive(Debug, Clone, Default)]
pub struct ActivityAccumulator {
    users: HashMap<String, BTreeMap<String, (u64, BTreeSet<NaiveDate>)>>,
}

impl ActivityAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, user_id: &str, country_id: &str, date: NaiveDate) {
        let countries = match self.users.get_mut(user_id) {
            Some(c) => c,
            None => self.users.entry(user_id.to_string()).or_default(),
        };
        let entry = match countries.get_mut(country_id) {
            Some(e) => e,
            None => countries.entry(country_id.to_string()).or_default(),
        };
        entry.0 += 1;
        entry.1.insert(date);
    }

    pub fn merge(&mut self, other: ActivityAccumulator) {
        for (user, countries) in other.users {
            let mine = self.users.entry(user).or_default();
            for (country, (count, days)) in countries {
                let e = mine.entry(country).or_default();
                e.0 += count;
                e.1.extend(days);
            }
        }
    }

    pub fn finish(self) -> BTreeMap<String, UserProfile> {
        self.users
            .into_iter()
            .map(|(user_id, countries)| {
                let per_country = countries
                    .into_iter()
                    .map(|(c, (count, days))| (c, CountryActivity { object_count: count, active_days: days.len() as u64 }))
                    .collect();
                (user_id.clone(), UserProfile { user_id, per_country })
            })
            .collect()
    }
}

/// Builds per-user profiles, rolling regions up to their country.
/// Unassigned records, and records in regions unknown to `rs`, are ignored.
pub fn accumulate<'a, I>(assigned: I, rs: &RegionSet) -> BTreeMap<String, UserProfile>
where
    I: IntoIterator<Item = &'a AssignedRecord>,
{
    let mut acc = ActivityAccumulator::new();
    for a in assigned {
        if let Some(country) = a.region_id.as_deref().and_then(|r| rs.country_of(r)) {
            acc.add(&a.record.user_id, country, a.record.taken_date());
        }
    }
    acc.finish()
}

fn unique_argmax(profile: &UserProfile, key: impl Fn(&CountryActivity) -> u64) -> Option<&str> {
    let mut best: Option<(&str, u64)> = None;
    let mut tied = false;
    for (country, activity) in &profile.per_country {
        let v = key(activity);
        match best {
            Some((_, b)) if v < b => {}
            Some((_, b)) if v == b => tied = true,
            _ => {
                best = Some((country, v));
                tied = false;
            }
        }
    }
    if tied {
        None
    } else {
        best.map(|(c, _)| c)
    }
}

pub fn infer_home(profile: &UserProfile) -> HomeAssignment {
    let by_objects = unique_argmax(profile, |a| a.object_count);
    let by_days = unique_argmax(profile, |a| a.active_days);
    let home_country = match (by_objects, by_days) {
        (Some(a), Some(b)) if a == b => Some(a.to_string()),
        _ => None,
    };
    HomeAssignment { user_id: profile.user_id.clone(), home_country }
}

pub fn infer_homes(profiles: &BTreeMap<String, UserProfile>) -> Homes {
    profiles.values().map(infer_home).map(|h| (h.user_id, h.home_country)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageStats {
    /// Share of assigned objects whose author has a defined home.
    pub defined_home_fraction: f64,
    /// Share of assigned objects taken outside the author's (defined) home.
    pub foreign_fraction: f64,
    pub total_objects: u64,
    pub defined_home_objects: u64,
    pub foreign_objects: u64,
}

pub fn coverage_stats(profiles: &BTreeMap<String, UserProfile>, homes: &Homes) -> CoverageStats {
    let mut total = 0u64;
    let mut defined = 0u64;
    let mut foreign = 0u64;
    for p in profiles.values() {
        let objects = p.total_objects();
        total += objects;
        if let Some(Some(home)) = homes.get(&p.user_id) {
            defined += objects;
            foreign += p.per_country.iter().filter(|(c, _)| *c != home).map(|(_, a)| a.object_count).sum::<u64>();
        }
    }
    let frac = |x: u64| if total == 0 { 0.0 } else { x as f64 / total as f64 };
    CoverageStats {
        defined_home_fraction: frac(defined),
        foreign_fraction: frac(foreign),
        total_objects: total,
        defined_home_objects: defined,
        foreign_objects: foreign,
    }
}
