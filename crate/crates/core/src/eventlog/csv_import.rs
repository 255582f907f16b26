use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use chrono::{DateTime, NaiveDateTime, Utc};

use super::{EventLog, EventLogError};
use crate::semantics::Trace;
use crate::tree::Activity;

/// Column mapping for CSV import. Without a timestamp column events keep
/// file order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CsvOptions {
    pub case_column: String,
    pub activity_column: String,
    pub timestamp_column: Option<String>,
    pub delimiter: u8,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            case_column: "case_id".into(),
            activity_column: "activity".into(),
            timestamp_column: Some("timestamp".into()),
            delimiter: b',',
        }
    }
}

pub fn import_csv(path: &Path, opts: &CsvOptions) -> Result<EventLog, EventLogError> {
    let file = std::fs::File::open(path).map_err(|source| EventLogError::Io { path: path.to_path_buf(), source })?;
    import_csv_reader(file, opts)
}

/// RFC 3339, or day-first `10/03/21 12:00` read as UTC.
pub(crate) fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    let s = s.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.with_timezone(&Utc));
    }
    NaiveDateTime::parse_from_str(s, "%d/%m/%y %H:%M").ok().map(|t| t.and_utc())
}

type Stamped = (Option<DateTime<Utc>>, Activity);

pub fn import_csv_reader<R: Read>(reader: R, opts: &CsvOptions) -> Result<EventLog, EventLogError> {
    let mut rdr = csv::ReaderBuilder::new().delimiter(opts.delimiter).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| EventLogError::Csv(e.to_string()))?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| EventLogError::MissingColumn(name.to_string()))
    };
    let case_col = col(&opts.case_column)?;
    let act_col = col(&opts.activity_column)?;
    let ts_col = opts.timestamp_column.as_deref().map(col).transpose()?;

    let mut order: Vec<String> = Vec::new();
    let mut events: HashMap<String, Vec<Stamped>> = HashMap::new();
    for (i, record) in rdr.records().enumerate() {
        // header is row 1
        let row = i + 2;
        let record = record.map_err(|e| EventLogError::Csv(e.to_string()))?;
        let field = |c: usize, name: &str| -> Result<String, EventLogError> {
            match record.get(c) {
                Some(v) if !v.is_empty() => Ok(v.to_string()),
                _ => Err(EventLogError::EmptyField { row, field: name.to_string() }),
            }
        };
        let case = field(case_col, &opts.case_column)?;
        let activity = Activity::new(field(act_col, &opts.activity_column)?);
        let ts = match ts_col {
            Some(c) => {
                let raw = field(c, opts.timestamp_column.as_deref().unwrap())?;
                Some(parse_timestamp(&raw).ok_or(EventLogError::BadTimestamp { row, value: raw })?)
            }
            None => None,
        };
        if !events.contains_key(&case) {
            order.push(case.clone());
        }
        events.entry(case).or_default().push((ts, activity));
    }
    if order.is_empty() {
        return Err(EventLogError::Empty);
    }
    let mut log = EventLog::new();
    for case in order {
        let mut evs = events.remove(&case).unwrap();
        evs.sort_by_key(|(ts, _)| *ts);
        log.push_case(case, evs.into_iter().map(|(_, a)| a).collect::<Trace>());
    }
    Ok(log)
}
