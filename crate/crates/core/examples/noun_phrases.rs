//! Noun-phrase chunking with the bundled grammar.

use vnqa::annotation::kinds;
use vnqa::Engine;

fn main() {
    let e = Engine::builtin().unwrap();
    for q in [
        "có bao nhiêu sinh viên học lớp k50 khoa học máy tính?",
        "danh sách tất cả các sinh viên có quê ở Hà Tây?",
        "giảng viên Trần Văn An có học vị là gì?",
    ] {
        let set = e.annotate(q).unwrap();
        println!("{q}");
        for np in set.of_kind(kinds::NOUN_PHRASE) {
            println!(
                "  [{}] core=`{}` head=`{}`",
                set.covered_text(np.span),
                np.feature("core").unwrap_or(""),
                np.feature("head").unwrap_or("")
            );
        }
    }
}
