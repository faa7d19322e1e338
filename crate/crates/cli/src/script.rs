//! Consultation scripts: one `question = answer` per line, `#` starts a comment line.

use consult_core::{AppliedAnswer, Error};

pub fn parse_script(text: &str) -> Result<Vec<AppliedAnswer>, Error> {
    let mut answers = Vec::new();
    let mut offset = 0;
    for (i, raw) in text.split_inclusive('\n').enumerate() {
        let line = raw.trim();
        if !line.is_empty() && !line.starts_with('#') {
            let fail = |message: &str| Error::Parse {
                line: i + 1,
                column: raw.len() - raw.trim_start().len() + 1,
                offset,
                message: message.into(),
            };
            let (q, a) = line
                .split_once('=')
                .ok_or_else(|| fail("expected `question = answer`"))?;
            let (q, a) = (q.trim(), a.trim());
            if q.is_empty() || a.is_empty() {
                return Err(fail("question and answer must both be given"));
            }
            answers.push(AppliedAnswer {
                question: q.into(),
                answer: a.into(),
            });
        }
        offset += raw.len();
    }
    Ok(answers)
}
