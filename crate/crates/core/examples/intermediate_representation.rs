//! Question class and query tuples, printed and as JSON.

use vnqa::Engine;

fn main() {
    let e = Engine::builtin().unwrap();
    let q = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "Danh sách tất cả các sinh viên có quê ở Hà Tây mà học lớp khoa học máy tính?".into());
    match e.analyse(&q) {
        Ok(a) => {
            println!("classes: {:?}", a.classes);
            println!("structure: {}", a.ir.structure);
            for t in &a.ir.tuples {
                println!("  {t}");
            }
            println!("{}", serde_json::to_string_pretty(&a.ir.to_json()).unwrap());
        }
        Err(err) => println!("{err}"),
    }
}
