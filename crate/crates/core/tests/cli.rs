mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bhswitch::construct::{fourier, kronecker};
use bhswitch::Monomial;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bhswitch"))
}

fn data_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn verify_exit_codes() {
    let d = data_path("bh12_3.txt");
    assert_eq!(code(&run(&["verify", d.to_str().unwrap()])), 0);
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "BH 2 2\n0 0\n0 0\n");
    assert_eq!(code(&run(&["verify", &bad])), 1);
    let garbage = write(dir.path(), "garbage.txt", "BH 2 2\n0 x\n");
    assert_eq!(code(&run(&["verify", &garbage])), 2);
    assert_eq!(code(&run(&["verify"])), 2);
    let um = write(dir.path(), "u.txt", "UM 2\n1 0 1 0\n1 0 -1 0\n");
    assert_eq!(code(&run(&["verify", "--float", &um])), 0);
}

#[test]
fn construct_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    for args in [vec!["fourier", "6"], vec!["circulant", "5"], vec!["paley", "11"]] {
        let mut full = vec!["construct"];
        full.extend(args.iter());
        let o = run(&full);
        assert_eq!(code(&o), 0, "{args:?}");
        let f = write(dir.path(), "m.txt", &stdout(&o));
        assert_eq!(code(&run(&["verify", &f])), 0, "{args:?}");
    }
    let f3 = write(dir.path(), "f3.txt", &stdout(&run(&["construct", "fourier", "3"])));
    let bush = stdout(&run(&["construct", "bush", &f3]));
    let b = write(dir.path(), "b.txt", &bush);
    assert_eq!(code(&run(&["verify", &b])), 0);
    let kron = stdout(&run(&["construct", "kron", &f3, &f3]));
    assert!(kron.starts_with("BH 9 3"));
    assert_eq!(code(&run(&["construct", "circulant", "6"])), 2);
}

#[test]
fn cert_and_equiv() {
    let dir = tempfile::tempdir().unwrap();
    let h = common::data("bh12_4.txt");
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let s = h.apply_monomial(&Monomial::random(12, 4, &mut rng), &Monomial::random(12, 4, &mut rng)).unwrap();
    let a = data_path("bh12_4.txt");
    let a = a.to_str().unwrap();
    let b = write(dir.path(), "s.txt", &s.emit());
    assert_eq!(stdout(&run(&["cert", a])), stdout(&run(&["cert", &b])));
    let o = run(&["equiv", a, &b]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("equivalent"));
    let f2 = fourier(2).lift(2);
    let other = write(dir.path(), "k.txt", &kronecker(&f2, &f2).emit());
    let f4 = write(dir.path(), "f4.txt", &fourier(4).emit());
    assert_eq!(code(&run(&["equiv", &f4, &other])), 1);
}

#[test]
fn sites_and_switch() {
    let dir = tempfile::tempdir().unwrap();
    let f3 = fourier(3);
    let k = write(dir.path(), "k.txt", &kronecker(&f3, &f3).emit());
    let o = run(&["sites", &k, "--family", "fourier"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().all(|l| l.starts_with("site ")));
    for family in ["fourier", "rank1"] {
        let o = run(&["switch", &k, "--family", family, "--site", "0", "--block", "1", "--coeff", "1"]);
        assert_eq!(code(&o), 0, "{family}");
        let f = write(dir.path(), "sw.txt", &stdout(&o));
        assert_eq!(code(&run(&["verify", &f])), 0, "{family}");
    }
    let g = data_path("bh12_3.txt");
    let g = g.to_str().unwrap();
    for (family, site) in [("genhall", "0"), ("rank2", "1")] {
        let o = run(&["switch", g, "--family", family, "--site", site, "--block", "2", "--coeff", "2"]);
        assert_eq!(code(&o), 0, "{family}");
        let f = write(dir.path(), "sw.txt", &stdout(&o));
        assert_eq!(code(&run(&["verify", &f])), 0, "{family}");
    }
    let o = run(&["switch", &k, "--family", "fourier", "--site", "999", "--coeff", "1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn trade_min_codes() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.txt", &fourier(3).emit());
    let o = run(&["trade-min", &f]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("size 3 b 3"));
    assert_eq!(code(&run(&["trade-min", &f, "--bound", "2"])), 1);
    assert_eq!(code(&run(&["trade-min", &f, "--budget", "2"])), 3);
}

#[test]
fn orbit_and_classify() {
    let dir = tempfile::tempdir().unwrap();
    let f2 = fourier(2);
    let seed = write(dir.path(), "seed.txt", &kronecker(&f2, &f2).emit());
    let out = dir.path().join("store");
    let out = out.to_str().unwrap();
    let o = run(&["orbit", "--seed", &seed, "--out", out, "--families", "fourier,rank1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("classes 1 "));
    let o = run(&["classify", out]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("classes 1\n"));
    let o = run(&["orbit", "--seed", &seed, "--out", out, "--families", "hall"]);
    assert_eq!(code(&o), 2);
    let budget = dir.path().join("b");
    let o = run(&["orbit", "--seed", &seed, "--out", budget.to_str().unwrap(), "--budget", "1"]);
    assert_eq!(code(&o), 3);
}
