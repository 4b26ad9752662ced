//! Dictionary segmentation and question-phrase marking.
//!
//!     cargo run --example segment_question -- "ai giảng dạy môn cơ sở dữ liệu?"

use vnqa::annotation::kinds;
use vnqa::preprocess::{mark_question_words, segment, Lexicon, QuestionPhraseTable};
use vnqa::resources;

fn main() {
    let q = std::env::args().nth(1).unwrap_or_else(|| "có bao nhiêu sinh viên học lớp k50 khoa học máy tính?".into());
    let lexicon = Lexicon::load(resources::LEXICON).unwrap();
    let phrases = QuestionPhraseTable::load(resources::QUESTION_PHRASES).unwrap();
    let set = mark_question_words(&segment(&q, &lexicon), &phrases);

    for t in set.of_kind(kinds::TOKEN) {
        println!("{:>3}..{:<3} {:<20} {}", t.span.start, t.span.end, set.covered_text(t.span), t.feature("category").unwrap_or("?"));
    }
    for w in set.of_kind(kinds::QUESTION_WORD) {
        println!("question word `{}` -> {}", set.covered_text(w.span), w.feature("qcat").unwrap_or("?"));
    }
}
