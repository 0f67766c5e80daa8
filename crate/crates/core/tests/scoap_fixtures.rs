mod common;
use ftmea_core::scoap::compute_scoap;

/// `net cc0 cc1 co` per line, sorted by net name; `inf` marks an unobservable net.
fn check(fixture: &str, expected: &str) {
    let n = common::fixture(fixture);
    let r = compute_scoap(&n).unwrap();
    let mut got: Vec<String> = n
        .nets()
        .map(|id| {
            let co = r.co(id).map_or_else(|| "inf".to_string(), |c| c.to_string());
            format!("{} {} {} {co}", n.net_name(id), r.cc0(id), r.cc1(id))
        })
        .collect();
    got.sort();
    let want: Vec<&str> = expected.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    assert_eq!(got, want, "{fixture}");
}

#[test]
fn nand_not() {
    check(
        "nand_not",
        "
        a 1 1 3
        b 1 1 3
        g1 3 2 1
        y 3 4 0
        ",
    );
}

#[test]
fn c17() {
    check(
        "c17",
        "
        N1 1 1 5
        N10 3 2 3
        N11 3 2 5
        N16 4 2 3
        N19 4 2 3
        N2 1 1 6
        N22 5 4 0
        N23 5 5 0
        N3 1 1 5
        N6 1 1 7
        N7 1 1 6
        ",
    );
}

#[test]
fn overlap6() {
    check(
        "overlap6",
        "
        a 1 1 3
        b 1 1 3
        c 1 1 2
        e 1 1 2
        g1 2 2 2
        g2 3 2 4
        g3 4 2 2
        w 2 3 0
        y 2 4 0
        z 4 4 0
        ",
    );
}

#[test]
fn adder4() {
    check(
        "adder4",
        "
        a0 1 1 4
        a1 1 1 7
        a2 1 1 7
        a3 1 1 7
        b0 1 1 4
        b1 1 1 7
        b2 1 1 7
        b3 1 1 7
        c1 5 4 4
        c2 7 4 4
        c3 7 4 4
        cin 1 1 4
        cout 7 4 0
        g0 2 3 7
        g1 2 3 9
        g2 2 3 9
        g3 2 3 5
        h0 2 5 7
        h1 4 8 7
        h2 4 8 7
        h3 4 8 3
        p0 3 3 2
        p1 3 3 5
        p2 3 3 5
        p3 3 3 5
        s0 5 5 0
        s1 8 8 0
        s2 8 8 0
        s3 8 8 0
        ",
    );
}

#[test]
fn register_locked() {
    check(
        "register_locked",
        "
        alm_wr 2 7 0
        bus_req 1 1 6
        cfg 2 2 0
        d 5 5 0
        din 1 1 10
        k0 1 1 6
        k1 1 1 6
        q 1 1 1
        t 3 9 2
        unlock 2 3 4
        we 1 1 6
        wen 2 5 2
        x 3 3 8
        ",
    );
}

#[test]
fn register_unlocked() {
    check(
        "register_unlocked",
        "
        cfg 2 2 0
        d 4 4 0
        din 1 1 6
        q 1 1 1
        t 2 5 2
        we 1 1 6
        x 3 3 4
        ",
    );
}

#[test]
fn register_bypass() {
    check(
        "register_bypass",
        "
        cfg 2 2 0
        d 2 2 0
        din 1 1 1
        q 1 1 1
        we 1 1 inf
        ",
    );
}

#[test]
fn parity_reg() {
    check(
        "parity_reg",
        "
        alarm 9 9 0
        d0 1 1 9
        d1 1 1 9
        d2 1 1 9
        d3 1 1 9
        h0 2 5 3
        h1 2 5 3
        h2 2 5 3
        h3 2 5 3
        hp 2 5 4
        key 1 1 9
        n0 5 6 0
        n1 5 6 0
        n2 5 6 0
        n3 5 6 0
        np 6 6 0
        nwen 6 3 5
        pw 7 7 9
        q0 1 1 1
        q1 1 1 1
        q2 1 1 1
        q3 1 1 1
        qp 1 1 8
        r0 2 2 0
        r1 2 2 0
        r2 2 2 0
        r3 2 2 0
        secret 1 1 9
        unlock 3 3 7
        w0 2 7 3
        w1 2 7 3
        w2 2 7 3
        w3 2 7 3
        we 1 1 9
        wen 2 5 5
        wp 3 13 3
        ",
    );
}
