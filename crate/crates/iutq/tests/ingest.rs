use std::fs;
use std::io::Write;
use std::path::Path;

use iutq::ingest::{load_trackfile, read_tracks, write_trackfile, LoadOptions};
use iutq::labels::{load_labels, read_labels};
use iutq::scores::{read_scores, write_scores, ScoreRow};
use iutq::IoError;
use iutq_core::synth::{build_recording, SceneSpec, SpatialLaw, SpeedLaw};
use iutq_core::{AgentId, AgentType, MetricId};
use proptest::prelude::*;

const HEADER: &str = "track_id,frame_id,timestamp_ms,agent_type,x,y,vx,vy,psi_rad,length,width\n";

fn grid_rows(agents: u64, frames: i64) -> String {
    let mut s = String::from(HEADER);
    for f in 1..=frames {
        for id in 1..=agents {
            s += &format!("{id},{f},{},car,{},{},1.5,0,0,4.5,1.8\n", f * 100, f as f64 * 0.15, id as f64 * 4.0);
        }
    }
    s
}

fn load_str(s: &str, opts: &LoadOptions) -> Result<(iutq_core::ScenarioTrackset, iutq::IngestReport), IoError> {
    read_tracks(s.as_bytes(), opts, Path::new("test.csv"))
}

#[test]
fn clean_file_loads_every_frame() {
    let (ts, report) = load_str(&grid_rows(3, 100), &LoadOptions::default()).unwrap();
    assert_eq!(ts.frames().len(), 100);
    assert_eq!(report.rows_read, 300);
    assert_eq!(report.rows_dropped, 0);
    assert_eq!(report.agents, 3);
    assert_eq!(report.duration_ms, 9900);
}

#[test]
fn non_numeric_row_is_dropped() {
    let s = grid_rows(3, 10).replacen(",0.15,4,", ",abc,4,", 1);
    let (ts, report) = load_str(&s, &LoadOptions::default()).unwrap();
    assert_eq!(report.rows_dropped, 1);
    assert_eq!(ts.frames()[0].len(), 2);
}

#[test]
fn inconsistent_and_duplicate_rows_are_dropped() {
    let mut s = grid_rows(2, 3);
    s += "1,3,300,car,9,9,0,0,0,4.5,1.8\n"; // duplicate key
    s += "3,3,350,car,9,9,0,0,0,4.5,1.8\n"; // timestamp off the frame
    s += "4,3,300,car,9,9,0,0,0,-1,1.8\n"; // bad outline
    s += "5,3,300,car,9,9\n"; // short row
    let (ts, report) = load_str(&s, &LoadOptions::default()).unwrap();
    assert_eq!(report.rows_dropped, 4);
    assert_eq!(ts.agent_count(), 2);
}

#[test]
fn pedestrians_only_is_an_empty_recording() {
    let s = format!("{HEADER}1,1,100,pedestrian/bicycle,0,0,1,0,,,\n1,2,200,pedestrian/bicycle,0.1,0,1,0,,,\n");
    assert!(matches!(load_str(&s, &LoadOptions::default()), Err(IoError::EmptyRecording { .. })));
    let opts = LoadOptions { include_other: true, ..LoadOptions::default() };
    let (ts, report) = load_str(&s, &opts).unwrap();
    assert_eq!(report.rows_filtered, 0);
    let p = &ts.frames()[0].agents()[0];
    assert_eq!(p.agent_type, AgentType::Other);
    assert_eq!(p.footprint, None);
}

#[test]
fn columns_are_matched_by_name() {
    let s = "x,y,track_id,timestamp_ms,frame_id,width,length,agent_type,vx,vy,psi_rad,extra\n\
             1,2,7,100,1,1.8,4.5,car,3,0,0.5,ignored\n";
    let (ts, _) = load_str(s, &LoadOptions::default()).unwrap();
    let a = ts.frames()[0].get(AgentId(7)).unwrap();
    assert_eq!((a.position.x, a.position.y, a.heading), (1.0, 2.0, 0.5));
    assert_eq!(a.footprint.map(|f| (f.length, f.width)), Some((4.5, 1.8)));
}

#[test]
fn missing_column_is_a_format_error() {
    let s = "track_id,frame_id,timestamp_ms,agent_type,x,y,vx,vy,length,width\n1,1,100,car,0,0,0,0,4,2\n";
    match load_str(s, &LoadOptions::default()) {
        Err(IoError::Format { message, .. }) => assert!(message.contains("psi_rad"), "{message}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn missing_file_is_a_file_error() {
    let r = load_trackfile("/nonexistent/track.csv", &LoadOptions::default());
    assert!(matches!(r, Err(IoError::File { .. })));
}

#[test]
fn frame_interval_scales_timestamps() {
    let s = format!("{HEADER}1,1,40,car,0,0,0,0,0,4,2\n1,2,80,car,0,0,0,0,0,4,2\n");
    let opts = LoadOptions { frame_interval_ms: 40, ..LoadOptions::default() };
    assert_eq!(load_str(&s, &opts).unwrap().0.frames().len(), 2);
    assert!(matches!(load_str(&s, &LoadOptions::default()), Err(IoError::EmptyRecording { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn write_and_reload_is_bitwise_identical(seed in any::<u64>(), n in 1usize..8, frames in 1usize..40) {
        let spec = SceneSpec { seed, n_agents: n, speed_law: SpeedLaw::Bimodal, spatial_law: SpatialLaw::Crossing, bounds: 80.0 };
        let ts = build_recording(&spec, frames, 100).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rec.csv");
        write_trackfile(&path, &ts).unwrap();
        let (loaded, report) = load_trackfile(&path, &LoadOptions::default()).unwrap();
        prop_assert_eq!(report.rows_dropped, 0);
        prop_assert_eq!(report.frames, frames);
        prop_assert_eq!(&loaded, &ts);
        let again = dir.path().join("again.csv");
        write_trackfile(&again, &loaded).unwrap();
        prop_assert_eq!(fs::read(&path).unwrap(), fs::read(&again).unwrap());
    }
}

#[test]
fn label_positive_rate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("labels.csv");
    let mut f = fs::File::create(&path).unwrap();
    writeln!(f, "recording_id,ego_id,timestamp_ms,critical").unwrap();
    for i in 0..29_569u64 {
        let v = if i < 4263 {
            "true"
        } else if i % 2 == 0 {
            "0"
        } else {
            "false"
        };
        writeln!(f, "r{},{},{},{v}", i % 7, i, i * 100).unwrap();
    }
    drop(f);
    let table = load_labels(&path).unwrap();
    assert_eq!(table.len(), 29_569);
    assert_eq!(table.positives(), 4263);
    assert!((table.positive_rate().unwrap() - 0.1442).abs() < 5e-5);
}

#[test]
fn label_edge_cases() {
    let origin = Path::new("labels.csv");
    let empty = read_labels("recording_id,ego_id,timestamp_ms,critical\n".as_bytes(), origin).unwrap();
    assert!(empty.is_empty());
    assert_eq!(empty.positive_rate(), None);
    let dup = "recording_id,ego_id,timestamp_ms,critical\nr,1,100,1\nr,1,100,0\n";
    assert!(matches!(read_labels(dup.as_bytes(), origin), Err(IoError::DuplicateLabel { .. })));
    let bad = "recording_id,ego_id,timestamp_ms,critical\nr,1,100,maybe\n";
    assert!(matches!(read_labels(bad.as_bytes(), origin), Err(IoError::Format { .. })));
    let missing = "recording_id,ego_id,critical\n";
    assert!(matches!(read_labels(missing.as_bytes(), origin), Err(IoError::Format { .. })));
}

#[test]
fn score_file_round_trip() {
    let id: std::sync::Arc<str> = "rec".into();
    let rows = vec![
        ScoreRow {
            recording_id: id.clone(),
            timestamp_ms: 100,
            ego: AgentId(3),
            metric: MetricId::ALL[0],
            value: Some(0.25),
            critical: true,
        },
        ScoreRow {
            recording_id: id,
            timestamp_ms: 100,
            ego: AgentId(3),
            metric: MetricId::ALL[1],
            value: None,
            critical: false,
        },
    ];
    let mut buf = Vec::new();
    write_scores(&mut buf, &rows, Path::new("s.csv")).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert_eq!(
        text,
        "recording_id,timestamp_ms,ego_id,metric_id,value,critical\nrec,100,3,dist,0.25,1\nrec,100,3,et,,0\n"
    );
    assert_eq!(read_scores(buf.as_slice(), Path::new("s.csv")).unwrap(), rows);
}
