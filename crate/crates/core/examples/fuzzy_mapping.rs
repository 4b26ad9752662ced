//! Mapping terms with typos or missing diacritics onto ontology names.

use vnqa::mapping::{map_term, similarity, MappingConfig};
use vnqa::ontology::Ontology;
use vnqa::resources;

fn main() {
    let o = Ontology::from_json(resources::ONTOLOGY).unwrap();
    let cfg = MappingConfig::default();
    for raw in ["Hà Tây", "Ha Tay", "lớp k50 khoa học máy tính", "lop khoa hoc may tinh", "Zzzz"] {
        let found = map_term(&o, raw, &cfg);
        let shown: Vec<String> = found.iter().map(|c| format!("{} {:.2}", c.id, c.score)).collect();
        println!("{raw:<30} {}", if shown.is_empty() { "no match".into() } else { shown.join(", ") });
    }
    println!("similarity(ha_tay, hà_tây) = {:.3}", similarity("ha_tay", "hà_tây"));
}
