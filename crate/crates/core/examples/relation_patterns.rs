//! Relation phrases and which grammar pattern produced each.

use vnqa::annotation::kinds;
use vnqa::Engine;

fn main() {
    let e = Engine::builtin().unwrap();
    for q in [
        "ai là sinh viên của lớp khoa học máy tính?",
        "giảng viên Lê Thị Bình có chức vụ là gì?",
        "sinh viên nào có quê ở Nam Định?",
        "giảng viên nào giảng dạy môn trí tuệ nhân tạo?",
    ] {
        let set = e.annotate(q).unwrap();
        for r in set.of_kind(kinds::RELATION) {
            println!("{:<50} pattern {}  `{}`", q, r.feature("pattern-id").unwrap_or("?"), set.covered_text(r.span));
        }
    }
}
