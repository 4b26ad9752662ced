//! Server-side storage for suspended mappings, keyed by opaque tokens.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use super::{MappingStep, SuspendedMapping};
use crate::ontology::Ontology;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PendingError {
    #[error("unknown token `{0}`")]
    Unknown(String),
    #[error("token `{0}` has expired")]
    Expired(String),
    #[error("choice {index} is out of range ({len} options)")]
    IndexOutOfRange { index: usize, len: usize },
}

#[derive(Debug)]
struct Entry<V> {
    value: V,
    touched: Instant,
}

/// Token-keyed values with an idle timeout and a size bound. When full, the
/// least recently touched entry is evicted.
#[derive(Debug)]
pub struct PendingTable<V> {
    entries: HashMap<String, Entry<V>>,
    ttl: Duration,
    capacity: usize,
}

/// A fresh random 128-bit token as 32 hex digits.
pub(crate) fn new_token() -> String {
    format!("{:032x}", rand::random::<u128>())
}

impl<V> PendingTable<V> {
    pub fn new(ttl: Duration, capacity: usize) -> Self {
        PendingTable {
            entries: HashMap::new(),
            ttl,
            capacity: capacity.max(1),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert(&mut self, value: V) -> String {
        self.insert_at(value, Instant::now())
    }

    pub fn insert_at(&mut self, value: V, now: Instant) -> String {
        let token = new_token();
        self.put_at(&token, value, now);
        token
    }

    /// Stores under a caller-chosen token, replacing any previous value.
    pub fn put_at(&mut self, token: &str, value: V, now: Instant) {
        self.purge_at(now);
        if !self.entries.contains_key(token) && self.entries.len() >= self.capacity {
            if let Some(oldest) = self.entries.iter().min_by_key(|(_, e)| e.touched).map(|(k, _)| k.clone()) {
                self.entries.remove(&oldest);
            }
        }
        self.entries.insert(token.to_string(), Entry { value, touched: now });
    }

    /// Runs `f` on a live entry and marks it touched.
    pub fn with_at<R>(&mut self, token: &str, now: Instant, f: impl FnOnce(&mut V) -> R) -> Result<R, PendingError> {
        let entry = self.live(token, now)?;
        entry.touched = now;
        Ok(f(&mut entry.value))
    }

    pub fn remove(&mut self, token: &str) -> Option<V> {
        self.entries.remove(token).map(|e| e.value)
    }

    /// Drops every entry idle for longer than the timeout.
    pub fn purge_at(&mut self, now: Instant) {
        let ttl = self.ttl;
        self.entries.retain(|_, e| now.saturating_duration_since(e.touched) <= ttl);
    }

    fn live(&mut self, token: &str, now: Instant) -> Result<&mut Entry<V>, PendingError> {
        let expired = match self.entries.get(token) {
            None => return Err(PendingError::Unknown(token.to_string())),
            Some(e) => now.saturating_duration_since(e.touched) > self.ttl,
        };
        if expired {
            self.entries.remove(token);
            return Err(PendingError::Expired(token.to_string()));
        }
        Ok(self.entries.get_mut(token).unwrap())
    }
}

/// Suspended mappings awaiting a user choice.
#[derive(Debug)]
pub struct PendingMappings {
    table: PendingTable<SuspendedMapping>,
}

impl Default for PendingMappings {
    fn default() -> Self {
        PendingMappings::new(Duration::from_secs(600), 1024)
    }
}

impl PendingMappings {
    pub fn new(ttl: Duration, capacity: usize) -> Self {
        PendingMappings {
            table: PendingTable::new(ttl, capacity),
        }
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Stores a suspended mapping and stamps its request with the new token.
    pub fn suspend_at(&mut self, mut s: SuspendedMapping, now: Instant) -> SuspendedMapping {
        let token = new_token();
        s.set_token(&token);
        self.table.put_at(&token, s.clone(), now);
        s
    }

    pub fn suspend(&mut self, s: SuspendedMapping) -> SuspendedMapping {
        self.suspend_at(s, Instant::now())
    }

    /// Applies a choice. A further ambiguity keeps the same token; a final
    /// outcome releases it. A bad index leaves the request in place.
    pub fn apply_choice_at(
        &mut self,
        ont: &Ontology,
        token: &str,
        index: usize,
        now: Instant,
    ) -> Result<MappingStep, PendingError> {
        let step = self.table.with_at(token, now, |s| s.choose(ont, index))?;
        let step = step.map_err(|e| PendingError::IndexOutOfRange { index: e.index, len: e.len })?;
        match &step {
            MappingStep::Suspended(next) => self.table.put_at(token, next.clone(), now),
            _ => {
                self.table.remove(token);
            }
        }
        Ok(step)
    }

    pub fn apply_choice(&mut self, ont: &Ontology, token: &str, index: usize) -> Result<MappingStep, PendingError> {
        self.apply_choice_at(ont, token, index, Instant::now())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::{map_tuple, MappingConfig};
    use crate::resources;
    use crate::semantic::{IntermediateRepresentation, QueryTuple, QuestionClass, QuestionStructure};

    fn suspended(o: &Ontology) -> SuspendedMapping {
        let ir = IntermediateRepresentation {
            structure: QuestionStructure::Normal,
            tuples: vec![QueryTuple {
                structure: QuestionStructure::Normal,
                qclass: QuestionClass::Who,
                term1: Some("ai".into()),
                relation: Some("là sinh viên của".into()),
                term2: Some("lớp khoa học máy tính".into()),
                term3: None,
            }],
            text: String::new(),
        };
        match map_tuple(o, &ir, &MappingConfig::default()) {
            MappingStep::Suspended(s) => s,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn token_lifecycle() {
        let o = Ontology::from_json(resources::ONTOLOGY).unwrap();
        let mut p = PendingMappings::default();
        let t0 = Instant::now();
        let s = p.suspend_at(suspended(&o), t0);
        let token = s.request().token.clone().unwrap();
        assert_eq!(token.len(), 32);

        let err = p.apply_choice_at(&o, &token, 42, t0).unwrap_err();
        assert!(matches!(err, PendingError::IndexOutOfRange { index: 42, .. }));
        assert_eq!(p.len(), 1, "request survives a bad index");

        let step = p.apply_choice_at(&o, &token, 0, t0).unwrap();
        assert!(matches!(step, MappingStep::Resolved(_)));
        assert_eq!(p.apply_choice_at(&o, &token, 0, t0).unwrap_err(), PendingError::Unknown(token));
    }

    #[test]
    fn expiry_is_distinct_from_unknown() {
        let o = Ontology::from_json(resources::ONTOLOGY).unwrap();
        let mut p = PendingMappings::new(Duration::from_secs(600), 8);
        let t0 = Instant::now();
        let token = p.suspend_at(suspended(&o), t0).request().token.clone().unwrap();
        let later = t0 + Duration::from_secs(601);
        assert_eq!(p.apply_choice_at(&o, &token, 0, later).unwrap_err(), PendingError::Expired(token));
    }

    #[test]
    fn capacity_evicts_least_recent() {
        let mut t: PendingTable<u32> = PendingTable::new(Duration::from_secs(60), 2);
        let now = Instant::now();
        let a = t.insert_at(1, now);
        let b = t.insert_at(2, now + Duration::from_secs(1));
        t.with_at(&a, now + Duration::from_secs(2), |_| ()).unwrap();
        let _c = t.insert_at(3, now + Duration::from_secs(3));
        assert_eq!(t.len(), 2);
        assert!(t.with_at(&a, now + Duration::from_secs(3), |_| ()).is_ok());
        assert_eq!(t.with_at(&b, now + Duration::from_secs(3), |_| ()), Err(PendingError::Unknown(b.clone())));
    }
}
