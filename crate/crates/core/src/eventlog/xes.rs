use std::path::Path;

use chrono::{DateTime, Utc};
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::csv_import::parse_timestamp;
use super::{read, EventLog, EventLogError};
use crate::tree::Activity;

/// Reads `concept:name` and `time:timestamp` from a XES document. Other
/// attributes are ignored.
pub fn import_xes_lite(path: &Path) -> Result<EventLog, EventLogError> {
    parse_xes_lite(&read(path)?)
}

#[derive(Default)]
struct PendingEvent {
    activity: Option<Activity>,
    timestamp: Option<DateTime<Utc>>,
}

fn xml_err(e: impl std::fmt::Display) -> EventLogError {
    EventLogError::Xml(e.to_string())
}

fn key_value(e: &BytesStart<'_>) -> Result<(String, String), EventLogError> {
    let (mut key, mut value) = (String::new(), String::new());
    for attr in e.attributes() {
        let attr = attr.map_err(xml_err)?;
        let v = attr.unescape_value().map_err(xml_err)?.into_owned();
        match attr.key.as_ref() {
            b"key" => key = v,
            b"value" => value = v,
            _ => {}
        }
    }
    Ok((key, value))
}

pub fn parse_xes_lite(text: &str) -> Result<EventLog, EventLogError> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().trim_text(true);

    let mut log = EventLog::new();
    let mut depth = 0usize;
    let mut saw_log = false;
    let mut trace: Option<(Option<String>, Vec<PendingEvent>)> = None;
    let mut event: Option<PendingEvent> = None;
    // depth of the element currently holding attributes we care about
    let mut trace_depth = 0usize;
    let mut event_depth = 0usize;

    loop {
        let ev = reader.read_event().map_err(xml_err)?;
        let (start, empty) = match &ev {
            Event::Start(e) => (Some(e.clone()), false),
            Event::Empty(e) => (Some(e.clone()), true),
            _ => (None, false),
        };
        if let Some(e) = start {
            depth += 1;
            match e.name().as_ref() {
                b"log" => saw_log = true,
                b"trace" if trace.is_none() => {
                    trace = Some((None, Vec::new()));
                    trace_depth = depth;
                }
                b"event" if trace.is_some() && event.is_none() => {
                    event = Some(PendingEvent::default());
                    event_depth = depth;
                }
                b"string" | b"date" => {
                    let (key, value) = key_value(&e)?;
                    if let Some(ev) = event.as_mut().filter(|_| depth == event_depth + 1) {
                        match key.as_str() {
                            "concept:name" => ev.activity = Some(Activity::new(value)),
                            "time:timestamp" => {
                                ev.timestamp = Some(
                                    parse_timestamp(&value)
                                        .ok_or_else(|| EventLogError::Xml(format!("bad time:timestamp '{value}'")))?,
                                )
                            }
                            _ => {}
                        }
                    } else if let Some((name, _)) = trace.as_mut().filter(|_| event.is_none() && depth == trace_depth + 1) {
                        if key == "concept:name" {
                            *name = Some(value);
                        }
                    }
                }
                _ => {}
            }
            if !empty {
                continue;
            }
            // an empty element closes immediately
            close(&mut depth, &mut trace, &mut event, trace_depth, event_depth, &mut log)?;
            continue;
        }
        match ev {
            Event::End(_) => close(&mut depth, &mut trace, &mut event, trace_depth, event_depth, &mut log)?,
            Event::Eof => break,
            _ => {}
        }
    }
    if depth != 0 {
        return Err(EventLogError::Xml("unexpected end of document".into()));
    }
    if !saw_log {
        return Err(EventLogError::Xml("no <log> element".into()));
    }
    Ok(log)
}

fn close(
    depth: &mut usize,
    trace: &mut Option<(Option<String>, Vec<PendingEvent>)>,
    event: &mut Option<PendingEvent>,
    trace_depth: usize,
    event_depth: usize,
    log: &mut EventLog,
) -> Result<(), EventLogError> {
    if event.is_some() && *depth == event_depth {
        trace.as_mut().unwrap().1.push(event.take().unwrap());
    } else if trace.is_some() && event.is_none() && *depth == trace_depth {
        let (name, events) = trace.take().unwrap();
        let index = log.len();
        let mut items = Vec::with_capacity(events.len());
        for (i, e) in events.into_iter().enumerate() {
            let a = e.activity.ok_or(EventLogError::MissingActivity { trace: index, event: i })?;
            items.push((e.timestamp, a));
        }
        if items.iter().all(|(ts, _)| ts.is_some()) {
            items.sort_by_key(|(ts, _)| *ts);
        }
        log.push_case(name.unwrap_or_else(|| (index + 1).to_string()), items.into_iter().map(|(_, a)| a).collect());
    }
    *depth -= 1;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::Trace;

    const TWO: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<log xes.version="1.0">
  <string key="concept:name" value="demo"/>
  <trace>
    <string key="concept:name" value="c1"/>
    <event><string key="concept:name" value="a"/><string key="lifecycle:transition" value="complete"/></event>
    <event><string key="concept:name" value="b"/></event>
  </trace>
  <trace>
    <string key="concept:name" value="c2"/>
    <event><string key="concept:name" value="a"/></event>
    <event><string key="concept:name" value="b"/></event>
  </trace>
</log>"#;

    #[test]
    fn two_identical_traces() {
        let log = parse_xes_lite(TWO).unwrap();
        assert_eq!(log.len(), 2);
        assert_eq!(log.cases()[0].case, "c1");
        assert_eq!(log.multiplicity(&Trace::parse("a,b")), 2);
    }

    #[test]
    fn timestamps_order_events() {
        let doc = r#"<log><trace>
            <event><string key="concept:name" value="b"/><date key="time:timestamp" value="2021-01-02T00:00:00Z"/></event>
            <event><string key="concept:name" value="a"/><date key="time:timestamp" value="2021-01-01T00:00:00Z"/></event>
        </trace></log>"#;
        assert_eq!(parse_xes_lite(doc).unwrap().cases()[0].trace, Trace::parse("a,b"));
    }

    #[test]
    fn malformed_documents() {
        assert!(matches!(parse_xes_lite("<log><trace></log>"), Err(EventLogError::Xml(_))));
        assert!(matches!(parse_xes_lite("<log><trace>"), Err(EventLogError::Xml(_))));
        let missing = "<log><trace><event><string key=\"org:resource\" value=\"x\"/></event></trace></log>";
        assert!(matches!(parse_xes_lite(missing), Err(EventLogError::MissingActivity { trace: 0, event: 0 })));
    }
}
