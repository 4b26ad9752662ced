//! Loading the bundled ontology and querying it directly.

use vnqa::ontology::{Element, Ontology};
use vnqa::resources;

fn print_tree(n: &vnqa::ontology::ConceptNode, depth: usize) {
    println!("{}{} ({})", "  ".repeat(depth), n.id, n.instances);
    for c in &n.children {
        print_tree(c, depth + 1);
    }
}

fn main() {
    let o = Ontology::from_json(resources::ONTOLOGY).unwrap();
    let s = o.summary();
    println!("{} concepts, {} properties, {} instances", s.concepts, s.properties, s.instances);
    print_tree(&o.concept_tree(), 0);

    // people include students and lecturers
    println!("person: {} instances", o.instances_of("person").unwrap().len());
    println!("students of k50: {:?}", o.subjects("học", "k50_khoa_học_máy_tính"));

    let k50 = Element::instance("k50_khoa_học_máy_tính");
    for r in o.relations_between(&Element::concept("person"), &k50) {
        println!("person ~ k50: {} {:?}", r.property, r.orientation);
    }
}
