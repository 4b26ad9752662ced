//! A question the mapper cannot settle alone: the options are printed, each
//! is tried in turn, and the suspended mapping stays reusable.

use vnqa::mapping::MappingStep;
use vnqa::Engine;

fn main() {
    let e = Engine::builtin().unwrap();
    let q = "ai là sinh viên của lớp khoa học máy tính?";
    let a = e.analyse(q).unwrap();
    let MappingStep::Suspended(s) = e.map(&a.ir) else {
        panic!("expected a disambiguation request");
    };
    let req = s.request();
    println!("`{}` could be:", req.slot.raw.as_deref().unwrap_or("?"));
    for (i, o) in req.options.iter().enumerate() {
        let step = e.resume(&s, i).unwrap();
        let answer = match step {
            MappingStep::Resolved(onto) => {
                let ans = e.extract(&a.ir, &onto).unwrap();
                format!("{} -> {} individuals", onto[0], ans.individuals().len())
            }
            MappingStep::Suspended(_) => "asks again".into(),
            MappingStep::Failed(f) => f.to_string(),
        };
        println!("  [{i}] {} {:?} {:.2}: {answer}", o.id, o.orientation, o.score);
    }
}
