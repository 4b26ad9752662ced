//! Ontology indexes against linear scans, and tuple evaluation against a
//! pass over all assertions.

mod common;

use common::*;
use vnqa::ontology::Ontology;
use vnqa::resources;

#[test]
fn indexes_match_scans_on_random_ontologies() {
    check(300, ontology_case(), ontology_index_property).unwrap();
}

#[test]
fn indexes_match_scans_on_fixture() {
    let o = Ontology::from_json(resources::ONTOLOGY).unwrap();
    for c in o.concepts() {
        assert_eq!(o.instances_of(&c.id).unwrap().to_vec(), scan_instances_of(&o, &c.id), "{}", c.id);
    }
}

#[test]
fn evaluation_matches_scan_on_fixture() {
    let o = Ontology::from_json(resources::ONTOLOGY).unwrap();
    check(1000, fixture_tuple(&o), |t| evaluate_scan_property(&o, t)).unwrap();
}
