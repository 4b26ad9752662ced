//! One question per answer kind: count, list, yes/no, value, description.

use vnqa::Engine;

fn main() {
    let e = Engine::builtin().unwrap();
    for q in [
        "có bao nhiêu sinh viên học lớp k50 khoa học máy tính?",
        "sinh viên nào học lớp k50 khoa học máy tính và có quê ở Hà Nội?",
        "Nguyễn Văn Huy có quê ở Hà Tây phải không?",
        "khoa công nghệ thông tin có mã là gì?",
        "Trần Văn An là ai?",
        "tại sao sinh viên học lớp k50 khoa học máy tính?",
    ] {
        let r = e.ask_auto(q).unwrap();
        println!("{q}\n[{}]\n{}\n", r.answer.payload.kind(), r.answer.rendered_text);
    }
}
