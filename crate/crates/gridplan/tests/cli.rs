use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gridplan::pnm;
use tempfile::TempDir;

fn gridplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gridplan"))
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn synth(dir: &Path, seed: u64) -> String {
    let out = dir.join("synth");
    let o = gridplan(&[
        "synth",
        "--out-dir",
        out.to_str().unwrap(),
        "--seed",
        &seed.to_string(),
        "--width",
        "220",
        "--height",
        "200",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    out.join("map.pgm").to_str().unwrap().to_string()
}

fn run(map: &str, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["--map", map, "--out-dir", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    gridplan(&args)
}

#[test]
fn synth_writes_map_metadata_and_truth() {
    let tmp = TempDir::new().unwrap();
    let map = synth(tmp.path(), 3);
    let dir = Path::new(&map).parent().unwrap();
    let grid = pnm::load_grid(Path::new(&map), None).unwrap();
    assert_eq!((grid.width(), grid.height()), (220, 200));
    assert_eq!(grid.resolution(), 0.05);
    let truth = gridplan::scene::from_json(&fs::read_to_string(dir.join("truth.json")).unwrap()).unwrap();
    assert!(truth.rooms.len() >= 2);
    assert!(truth.log_posterior.is_none());
}

#[test]
fn run_writes_every_artifact() {
    let tmp = TempDir::new().unwrap();
    let map = synth(tmp.path(), 4);
    let out = tmp.path().join("out");
    let o = run(&map, &out, &["--iterations", "300", "--seed", "9"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(
        stdout.contains("best log-posterior") && stdout.contains("it/s"),
        "{stdout}"
    );
    for f in [
        "world_best.json",
        "world_final.json",
        "overlay_best.ppm",
        "classified.ppm",
        "trace.csv",
    ] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    for f in ["overlay_best.ppm", "classified.ppm"] {
        let img = pnm::parse_pixmap(&fs::read(out.join(f)).unwrap()).unwrap();
        assert_eq!((img.width, img.height), (220, 200), "{f}");
    }
    let trace = fs::read_to_string(out.join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 301);
    let best = gridplan::scene::from_json(&fs::read_to_string(out.join("world_best.json")).unwrap()).unwrap();
    assert!(best.log_posterior.is_some());
    assert!(!out.join("snapshots").exists());
}

#[test]
fn same_seed_gives_byte_identical_outputs() {
    let tmp = TempDir::new().unwrap();
    let map = synth(tmp.path(), 5);
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    for d in [&a, &b] {
        assert_eq!(code(&run(&map, d, &["--iterations", "1500", "--seed", "21"])), 0);
    }
    assert_eq!(code(&run(&map, &c, &["--iterations", "1500", "--seed", "22"])), 0);
    for f in ["world_best.json", "trace.csv", "world_final.json", "overlay_best.ppm"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    assert_ne!(
        fs::read(a.join("trace.csv")).unwrap(),
        fs::read(c.join("trace.csv")).unwrap()
    );
}

#[test]
fn config_file_drives_the_run_and_flags_override_it() {
    let tmp = TempDir::new().unwrap();
    let map = synth(tmp.path(), 6);
    let cfg = tmp.path().join("run.toml");
    fs::write(
        &cfg,
        format!("[map]\npath = {map:?}\n\n[run]\nseed = 4\niterations = 50\nout_dir = \"from_config\"\n"),
    )
    .unwrap();
    let o = gridplan(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let trace = fs::read_to_string(tmp.path().join("from_config/trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 51);

    let out = tmp.path().join("flags");
    let o = gridplan(&[
        "--config",
        cfg.to_str().unwrap(),
        "--iterations",
        "20",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(fs::read_to_string(out.join("trace.csv")).unwrap().lines().count(), 21);
}

#[test]
fn zero_iterations_write_an_empty_world() {
    let tmp = TempDir::new().unwrap();
    let map = synth(tmp.path(), 7);
    let out = tmp.path().join("out");
    let o = run(&map, &out, &["--iterations", "0"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let trace = fs::read_to_string(out.join("trace.csv")).unwrap();
    assert_eq!(
        trace.lines().collect::<Vec<_>>(),
        ["iteration,kernel,log_posterior,accepted,acceptance_rate_window100"]
    );
    for f in ["world_best.json", "world_final.json"] {
        let s = gridplan::scene::from_json(&fs::read_to_string(out.join(f)).unwrap()).unwrap();
        assert!(
            s.rooms.is_empty() && s.doors.is_empty() && s.adjacency.is_empty(),
            "{f}"
        );
    }
    let overlay = fs::read(out.join("overlay_best.ppm")).unwrap();
    let grid = pnm::load_grid(Path::new(&map), None).unwrap();
    assert_eq!(pnm::parse_pixmap(&overlay).unwrap(), pnm::render_grayscale(&grid));
}

#[test]
fn missing_map_is_an_io_error() {
    let tmp = TempDir::new().unwrap();
    let o = run(
        tmp.path().join("nope.pgm").to_str().unwrap(),
        &tmp.path().join("out"),
        &[],
    );
    assert_eq!(code(&o), 1);
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains("file not found"), "{err}");
}

#[test]
fn malformed_map_is_an_io_error() {
    let tmp = TempDir::new().unwrap();
    let bad = tmp.path().join("bad.pgm");
    fs::write(&bad, b"P5\n4 4\n255\nabc").unwrap();
    let o = run(bad.to_str().unwrap(), &tmp.path().join("out"), &[]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
}

#[test]
fn bad_configuration_exits_with_two() {
    let tmp = TempDir::new().unwrap();
    let map = synth(tmp.path(), 8);
    let out = tmp.path().join("out");
    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "[run]\nno_such_key = 1\n").unwrap();
    assert_eq!(code(&gridplan(&["--config", cfg.to_str().unwrap(), "--map", &map])), 2);
    fs::write(&cfg, "[classifier]\noccupied = 200\nunexplained = 100\n").unwrap();
    assert_eq!(
        code(&gridplan(&[
            "--config",
            cfg.to_str().unwrap(),
            "--map",
            &map,
            "--out-dir",
            out.to_str().unwrap()
        ])),
        2
    );
    assert_eq!(code(&run(&map, &out, &["--chains", "0"])), 2);
    assert_eq!(code(&gridplan(&["--iterations", "5"])), 2);
    assert_eq!(
        code(&gridplan(&[
            "--config",
            tmp.path().join("absent.toml").to_str().unwrap()
        ])),
        1
    );
}

#[test]
fn snapshots_are_written_at_the_requested_period() {
    let tmp = TempDir::new().unwrap();
    let map = synth(tmp.path(), 9);
    let out = tmp.path().join("out");
    let o = run(&map, &out, &["--iterations", "250", "--snapshot-every", "100"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut names: Vec<String> = fs::read_dir(out.join("snapshots"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["iter_000100.ppm", "iter_000200.ppm"]);
    let img = pnm::parse_pixmap(&fs::read(out.join("snapshots/iter_000200.ppm")).unwrap()).unwrap();
    assert_eq!((img.width, img.height), (220, 200));
}

#[test]
fn several_chains_keep_the_best_world() {
    let tmp = TempDir::new().unwrap();
    let map = synth(tmp.path(), 10);
    let out = tmp.path().join("multi");
    let o = run(
        &map,
        &out,
        &[
            "--iterations",
            "1000",
            "--chains",
            "3",
            "--seed",
            "40",
            "--snapshot-every",
            "500",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let best = gridplan::scene::from_json(&fs::read_to_string(out.join("world_best.json")).unwrap()).unwrap();
    let best = best.log_posterior.unwrap();
    for (i, seed) in ["40", "41", "42"].iter().enumerate() {
        let single = tmp.path().join(format!("single{i}"));
        assert_eq!(code(&run(&map, &single, &["--iterations", "1000", "--seed", seed])), 0);
        let s = gridplan::scene::from_json(&fs::read_to_string(single.join("world_best.json")).unwrap()).unwrap();
        assert!(s.log_posterior.unwrap() <= best);
    }
    assert!(out.join("snapshots/chain2_iter_001000.ppm").is_file());
}

#[test]
fn verify_mode_runs_clean() {
    let tmp = TempDir::new().unwrap();
    let map = synth(tmp.path(), 11);
    let o = run(&map, &tmp.path().join("out"), &["--iterations", "2000", "--verify"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}
