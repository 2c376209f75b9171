use std::path::Path;
use std::process::Command;

use serde_json::Value;
use tempfile::tempdir;

use wallgrowth::asymptotics::q_poly;
use wallgrowth::dynamics::{packed_config, EventLog, Event, Direction};
use wallgrowth::special::bessel_i;
use wallgrowth_cli::simulate::read_histogram;
use wallgrowth_cli::{run_args, ResultRecord};

fn run(args: &[&str]) -> i32 {
    run_args(std::iter::once("wallgrowth").chain(args.iter().copied()))
}

fn lines(path: &Path) -> Vec<Value> {
    std::fs::read_to_string(path).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn record(path: &Path) -> ResultRecord {
    ResultRecord::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn zero_time_gives_the_packed_configuration() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("rows.jsonl");
    assert_eq!(run(&["simulate", "--time", "0", "--levels", "5", "--seed", "7", "--out", out.to_str().unwrap()]), 0);
    let l = lines(&out);
    assert_eq!(l[0]["type"], "header");
    assert_eq!(l[0]["format_version"], 1);
    let rows: Vec<Vec<i64>> = serde_json::from_value(l[1]["rows"].clone()).unwrap();
    assert_eq!(rows, packed_config(5).rows());
}

#[test]
fn simulation_output_is_deterministic_across_job_counts() {
    let dir = tempdir().unwrap();
    let mut bytes = Vec::new();
    let (out, ev) = (dir.path().join("r.jsonl"), dir.path().join("e.jsonl"));
    for jobs in ["1", "4", "4"] {
        let code = run(&[
            "--jobs", jobs, "simulate", "--time", "2", "--levels", "40", "--replicas", "1000", "--seed", "1",
            "--out", out.to_str().unwrap(), "--events", ev.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        bytes.push((std::fs::read(&out).unwrap(), std::fs::read(&ev).unwrap()));
    }
    assert!(bytes.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn histogram_conserves_particles_and_events_replay() {
    let dir = tempdir().unwrap();
    let (out, ev, hist, rec) =
        (dir.path().join("r.jsonl"), dir.path().join("e.jsonl"), dir.path().join("h.csv"), dir.path().join("rec.json"));
    let reps = 300u64;
    let levels = 9usize;
    let code = run(&[
        "simulate", "--time", "1.5", "--levels", "9", "--replicas", "300", "--seed", "2",
        "--out", out.to_str().unwrap(), "--events", ev.to_str().unwrap(),
        "--histogram", hist.to_str().unwrap(), "--record", rec.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let h = read_histogram(&hist).unwrap();
    for m in 1..=levels {
        let total: u64 = h.iter().filter(|e| e.0 .0 == m).map(|e| e.1).sum();
        assert_eq!(total, reps * m.div_ceil(2) as u64, "row {m}");
    }
    let r = record(&rec);
    assert_eq!(r.outputs["particles_per_replica"], 25);
    assert_eq!(r.rng, wallgrowth::dynamics::RNG_NAME);

    let samples = lines(&out);
    let events = lines(&ev);
    for replica in [0u64, 17, 299] {
        let log = EventLog {
            events: events[1..]
                .iter()
                .filter(|e| e["replica"] == replica)
                .map(|e| Event {
                    time: e["time"].as_f64().unwrap(),
                    m: e["m"].as_u64().unwrap() as usize,
                    k: e["k"].as_u64().unwrap() as usize,
                    direction: if e["direction"] == "left" { Direction::Left } else { Direction::Right },
                    extent: e["extent"].as_u64().unwrap() as usize,
                })
                .collect(),
        };
        let rows: Vec<Vec<i64>> = serde_json::from_value(samples[1 + replica as usize]["rows"].clone()).unwrap();
        assert_eq!(log.replay(levels).unwrap().rows(), rows);
    }
}

#[test]
fn snapshot_matches_the_golden_file() {
    let dir = tempdir().unwrap();
    let svg = dir.path().join("s.svg");
    let code = run(&["simulate", "--time", "0", "--levels", "6", "--out", "/dev/null", "--snapshot", svg.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_to_string(svg).unwrap(), include_str!("golden/packed6.svg"));
}

#[test]
fn kernel_command_end_to_end() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("k.json");
    let g = 2.5f64;
    let code = run(&["kernel", "--points", "1,-1/2,0;1,-1/2,3", "--gamma", "2.5", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let r = record(&out);
    let m: Vec<Vec<f64>> = serde_json::from_value(r.outputs["matrix"].clone()).unwrap();
    assert!((m[0][0] - (-g).exp() * bessel_i(0, g)).abs() < 1e-8);
    assert!((m[1][1] - 2.0 * (-g).exp() * bessel_i(3, g)).abs() < 1e-8);
    let det = r.outputs["determinant"].as_f64().unwrap();
    assert!((det - (m[0][0] * m[1][1] - m[0][1] * m[1][0])).abs() < 1e-14);
    assert_eq!(r.outputs["effective_u_nodes"], 512);

    let hole = dir.path().join("h.json");
    let code = run(&["kernel", "--points", "1,-1/2,0;1,-1/2,3", "--gamma", "2.5", "--hole", "--out", hole.to_str().unwrap()]);
    assert_eq!(code, 0);
    let hm: Vec<Vec<f64>> = serde_json::from_value(record(&hole).outputs["matrix"].clone()).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            let d = if i == j { 1.0 } else { 0.0 };
            assert!((hm[i][j] + m[i][j] - d).abs() < 1e-12);
        }
    }

    let triv = dir.path().join("t.json");
    let code = run(&["kernel", "--points", "4,+1/2,3;4,+1/2,4;3,-1/2,0", "--gamma", "0", "--out", triv.to_str().unwrap()]);
    assert_eq!(code, 0);
    let tm: Vec<Vec<f64>> = serde_json::from_value(record(&triv).outputs["matrix"].clone()).unwrap();
    for (i, want) in [1.0, 0.0, 1.0].iter().enumerate() {
        assert!((tm[i][i] - want).abs() < 1e-8);
    }
}

#[test]
fn kernel_command_reports_bad_input() {
    assert_eq!(run(&["kernel", "--points", "1,0,2"]), 1);
    assert_eq!(run(&["kernel", "--points", "1,-1/2,0", "--gamma", "1", "--radius", "0.5"]), 1);
}

#[test]
fn shape_grid_regions_follow_the_boundary() {
    let dir = tempdir().unwrap();
    let (out, csv) = (dir.path().join("s.json"), dir.path().join("s.csv"));
    let code = run(&[
        "shape", "--time", "1", "--d-min", "0.05", "--d-max", "4", "--d-steps", "60", "--l-min", "0.2", "--l-max",
        "4", "--l-steps", "25", "--out", out.to_str().unwrap(), "--csv", csv.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let r = record(&out);
    let (d, l) = (floats(&r.outputs["d"]), floats(&r.outputs["l"]));
    let region: Vec<String> = serde_json::from_value(r.outputs["region"].clone()).unwrap();
    let h: Vec<Option<f64>> = serde_json::from_value(r.outputs["h"].clone()).unwrap();
    for i in 0..d.len() {
        if region[i] == "frozen-right" {
            assert_eq!(h[i], Some(0.0));
        }
        if region[i] != "degenerate" {
            assert_eq!(region[i] == "liquid", q_poly(1.0, l[i], d[i]) < 0.0, "({}, {})", d[i], l[i]);
        }
    }
    let (cl, q1, q2) = (floats(&r.outputs["curve_l"]), floats(&r.outputs["curve_q1"]), floats(&r.outputs["curve_q2"]));
    for j in 0..cl.len() {
        if 1.0 / cl[j] >= 0.5 {
            assert_eq!(q1[j], 0.0);
        }
        // every region change along a row sits in the cell holding l q1 or l q2
        let row: Vec<usize> = (0..d.len()).filter(|&i| l[i] == cl[j]).collect();
        for w in row.windows(2) {
            let (a, b) = (w[0], w[1]);
            if region[a] != region[b] {
                let (lo, hi) = (d[a], d[b]);
                let crosses = |x: f64| lo <= x && x <= hi;
                assert!(crosses(cl[j] * q1[j]) || crosses(cl[j] * q2[j]), "l = {} between {lo} and {hi}", cl[j]);
            }
        }
    }
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("format_version,t,d,l,h,density,region"));
    assert_eq!(text.lines().count(), 1 + 60 * 25);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempdir().unwrap();
    let (cfg, out) = (dir.path().join("run.cfg"), dir.path().join("r.jsonl"));
    std::fs::write(&cfg, "time = 0\nlevels = 3\nreplicas = 2\n").unwrap();
    let code = run(&["--config", cfg.to_str().unwrap(), "simulate", "--levels", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let l = lines(&out);
    assert_eq!(l.len(), 3);
    let rows: Vec<Vec<i64>> = serde_json::from_value(l[2]["rows"].clone()).unwrap();
    assert_eq!(rows, packed_config(4).rows());
    std::fs::write(&cfg, "temperature = 3\n").unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap(), "simulate", "--out", out.to_str().unwrap()]), 1);
}

#[test]
fn verify_quadrature_passes_and_unknown_suite_is_a_usage_error() {
    let dir = tempdir().unwrap();
    let rep = dir.path().join("v.json");
    assert_eq!(run(&["verify", "quadrature", "--report", rep.to_str().unwrap()]), 0);
    let r = record(&rep);
    assert_eq!(r.outputs["passed"], true);
    assert_eq!(r.outputs["suite"], "quadrature");
    assert_eq!(r.outputs["criteria"]["criterion_01"]["passed"], true);

    let status = Command::new(env!("CARGO_BIN_EXE_wallgrowth")).args(["verify", "nonsense"]).output().unwrap();
    assert_eq!(status.status.code(), Some(2));
    let status = Command::new(env!("CARGO_BIN_EXE_wallgrowth")).args(["simulate", "--time", "-1"]).output().unwrap();
    assert_ne!(status.status.code(), Some(0));
}
