use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn dctsteg(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dctsteg"))
        .args(args.iter().map(|a| a.as_ref()))
        .output()
        .expect("spawn dctsteg")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn field<'a>(line: &'a str, key: &str) -> &'a str {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("no {key} in {line:?}"))
}

fn write_pgm(path: &Path, w: u32, h: u32, f: impl Fn(u32, u32) -> u8) {
    let mut bytes = format!("P5\n{w} {h}\n255\n").into_bytes();
    for y in 0..h {
        for x in 0..w {
            bytes.push(f(x, y));
        }
    }
    std::fs::write(path, bytes).unwrap();
}

#[test]
fn bytes_round_trip_container() {
    let dir = TempDir::new().unwrap();
    let secret = dir.path().join("secret.txt");
    let text = "The quick brown fox jumps over the lazy dog. ".repeat(40);
    std::fs::write(&secret, &text).unwrap();
    let out = dir.path().join("stego.dsc");
    let back = dir.path().join("back.txt");

    let o = dctsteg(&[
        &"embed",
        &"--cover",
        &fixture("camera.pgm"),
        &"--secret",
        &secret,
        &"--out",
        &out,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let line = stdout(&o);
    assert_eq!(line.lines().count(), 1);
    assert_eq!(field(&line, "mode"), "container");
    assert_eq!(field(&line, "residual_bit_errors"), "0");
    assert!(std::fs::read(&out).unwrap().starts_with(b"DST1"));

    let o = dctsteg(&[&"extract", &"--in", &out, &"--out", &back]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(field(&stdout(&o), "secret_kind"), "bytes");
    assert_eq!(std::fs::read(&back).unwrap(), text.as_bytes());
}

#[test]
fn image_secret_round_trip_spatial8() {
    let dir = TempDir::new().unwrap();
    let secret = dir.path().join("secret.pgm");
    write_pgm(&secret, 40, 30, |x, y| ((x / 4 + y / 3) * 16) as u8);
    let out = dir.path().join("stego.pgm");
    let back = dir.path().join("back.pgm");

    let o = dctsteg(&[
        &"embed",
        &"--cover",
        &fixture("moon.pgm"),
        &"--secret",
        &secret,
        &"--secret-kind",
        &"image",
        &"--mode",
        &"spatial8",
        &"--out",
        &out,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let line = stdout(&o);
    assert_eq!(field(&line, "mode"), "spatial8");
    assert_eq!(field(&line, "residual_bit_errors"), "0");
    let db: f64 = field(&line, "psnr_db").parse().unwrap();
    assert!(db > 40.0, "{line}");

    let o = dctsteg(&[&"inspect", &"--in", &out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let line = stdout(&o);
    assert_eq!(field(&line, "artifact"), "spatial8");
    assert_eq!(field(&line, "secret_width"), "40");
    assert_eq!(field(&line, "secret_height"), "30");
    assert_eq!(field(&line, "symbol_count"), "1200");

    let o = dctsteg(&[&"extract", &"--in", &out, &"--out", &back]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        stdout(&o).trim(),
        "secret_kind=image symbol_count=1200 width=40 height=30"
    );
    assert_eq!(
        std::fs::read(&back).unwrap(),
        std::fs::read(&secret).unwrap()
    );
}

#[test]
fn image_secret_192x195_fits_iff_frame_fits() {
    let dir = TempDir::new().unwrap();
    for (name, expect) in [("moon_192x195.pgm", 0), ("coins_192x195.pgm", 2)] {
        let out = dir.path().join(format!("{name}.dsc"));
        let o = dctsteg(&[
            &"embed",
            &"--cover",
            &fixture("brick.pgm"),
            &"--secret",
            &fixture(name),
            &"--secret-kind",
            &"image",
            &"--out",
            &out,
        ]);
        assert_eq!(o.status.code(), Some(expect), "{name}: {}", stderr(&o));
        if expect == 0 {
            let frame_bits: u64 = field(&stdout(&o), "frame_bits").parse().unwrap();
            assert!(frame_bits <= 262_144);
        } else {
            assert!(stdout(&o).is_empty());
            assert!(stderr(&o).contains("payload too large"));
        }
    }
}

#[test]
fn tiny_cover_is_payload_too_large() {
    let dir = TempDir::new().unwrap();
    let cover = dir.path().join("cover.pgm");
    write_pgm(&cover, 8, 8, |_, _| 128);
    let secret = dir.path().join("s");
    std::fs::write(&secret, b"x").unwrap();
    let o = dctsteg(&[
        &"embed",
        &"--cover",
        &cover,
        &"--secret",
        &secret,
        &"--out",
        &dir.path().join("o"),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("payload too large"));
    assert_eq!(stderr(&o).lines().count(), 1);
    assert!(!dir.path().join("o").exists());
}

#[test]
fn capacity_and_psnr_lines() {
    let o = dctsteg(&[&"capacity", &"--cover", &fixture("camera.pgm")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "raw_slots=262144 payload_bits=259968\n");

    let cam = fixture("camera.pgm");
    let o = dctsteg(&[&"psnr", &"--a", &cam, &"--b", &cam]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "psnr_db=inf mse=0.000000\n");

    let o = dctsteg(&[&"psnr", &"--a", &cam, &"--b", &fixture("coins_192x195.pgm")]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn non_stego_inputs_exit_four() {
    let dir = TempDir::new().unwrap();
    let o = dctsteg(&[&"inspect", &"--in", &fixture("camera.pgm")]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());

    let junk = dir.path().join("junk.bin");
    std::fs::write(&junk, b"definitely not an image").unwrap();
    let o = dctsteg(&[&"extract", &"--in", &junk, &"--out", &dir.path().join("o")]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(stderr(&o).lines().count(), 1);
}

#[test]
fn malformed_inputs_exit_three() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.pgm");
    std::fs::write(&bad, b"P5\n4 4\n255\n\x00\x01").unwrap();
    let o = dctsteg(&[&"capacity", &"--cover", &bad]);
    assert_eq!(o.status.code(), Some(3));

    let odd = dir.path().join("odd.pgm");
    write_pgm(&odd, 12, 8, |_, _| 0);
    let o = dctsteg(&[&"capacity", &"--cover", &odd]);
    assert_eq!(o.status.code(), Some(3));

    let o = dctsteg(&[
        &"extract",
        &"--in",
        &dir.path().join("missing.dsc"),
        &"--out",
        &bad,
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn usage_error_exits_one() {
    let o = dctsteg(&[&"embed", &"--mode", &"lossy"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).is_empty());
    assert_eq!(stderr(&o).lines().count(), 1);
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let secret = dir.path().join("s.bin");
    std::fs::write(
        &secret,
        (0..5000u32)
            .map(|i| (i * i % 251) as u8)
            .collect::<Vec<_>>(),
    )
    .unwrap();
    let mut runs = Vec::new();
    for (i, mode) in ["container", "spatial8", "container", "spatial8"]
        .iter()
        .enumerate()
    {
        let out = dir.path().join(format!("o{i}"));
        let o = dctsteg(&[
            &"embed",
            &"--cover",
            &fixture("astronaut.pgm"),
            &"--secret",
            &secret,
            &"--mode",
            mode,
            &"--out",
            &out,
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        runs.push((stdout(&o), std::fs::read(&out).unwrap()));
    }
    assert_eq!(runs[0], runs[2]);
    assert_eq!(runs[1], runs[3]);
}
