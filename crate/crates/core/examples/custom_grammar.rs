//! Writing a rule by hand and running it with the pattern engine.

use vnqa::annotation::{apply_rules, kinds, parse_rules};
use vnqa::preprocess::{segment, Lexicon};
use vnqa::resources;

const RULES: &str = "
# a person name after a title noun
rule titled_person 5
  1 TokenVn.string=giảng viên | TokenVn.string=sinh viên
  1 TokenVn.category=Np @name
  emit TitledPerson name=@name
";

fn main() {
    let rules = parse_rules(RULES).unwrap();
    let lexicon = Lexicon::load(resources::LEXICON).unwrap();
    let set = segment("giảng viên Trần Văn An dạy sinh viên Nguyễn Văn Huy", &lexicon);
    let out = apply_rules(&rules, &set);
    for a in out.of_kind("TitledPerson") {
        println!("{} -> name={}", out.covered_text(a.span), a.feature("name").unwrap_or(""));
    }
    println!("{} tokens", out.of_kind(kinds::TOKEN).count());
}
