mod common;

use qbf_synth::benchgen::{bitonic_sorter, chip, truth_table_requirement, Family};

use common::{check_family, exhaust};

#[test]
fn arithmetic_families() {
    for f in [Family::Add, Family::Sub, Family::Cmp] {
        for n in 1..=3 {
            check_family(f, n);
        }
    }
}

#[test]
fn routing_families() {
    for n in [2, 4, 8] {
        check_family(Family::Mux, n);
        check_family(Family::Demux, n);
    }
    for n in 1..=3 {
        check_family(Family::Shift, n);
    }
}

#[test]
fn counting_families() {
    for n in [3, 7, 15] {
        check_family(Family::Moa, n);
    }
    for n in 2..=4 {
        check_family(Family::Mul, n);
    }
}

#[test]
fn table_requirement_matches_its_table() {
    let c = truth_table_requirement(&["12D"], 4).unwrap();
    let want: u64 = 0x12D;
    let names = c.input_names();
    for r in 0..16u64 {
        let bits: Vec<bool> = (0..4).map(|i| (r >> (3 - i)) & 1 == 1).collect();
        let ins = names.iter().cloned().zip(bits).collect();
        assert_eq!(c.evaluate(&ins).unwrap()["y0"], (want >> r) & 1 == 1);
    }
    let and = truth_table_requirement(&["8"], 2).unwrap();
    assert_eq!(and.evaluate_bits(&[true, true]).unwrap(), vec![true]);
    assert_eq!(and.evaluate_bits(&[true, false]).unwrap(), vec![false]);
}

#[test]
fn chip_74283_adds() {
    let c = chip("74283").unwrap();
    exhaust(&c, |p| {
        let a = (1..=4).fold(0, |acc, i| {
            acc | (u64::from(p.bit_in(&format!("A{i}"))) << (i - 1))
        });
        let b = (1..=4).fold(0, |acc, i| {
            acc | (u64::from(p.bit_in(&format!("B{i}"))) << (i - 1))
        });
        let s = (1..=4).fold(0, |acc, i| {
            acc | (u64::from(p.bit_out(&format!("S{i}"))) << (i - 1))
        });
        let got = s | (u64::from(p.bit_out("C4")) << 4);
        assert_eq!(got, a + b + u64::from(p.bit_in("C0")));
    });
}

#[test]
fn chip_74182_looks_ahead() {
    let c = chip("74182").unwrap();
    exhaust(&c, |p| {
        let g: Vec<bool> = (0..4).map(|i| !p.bit_in(&format!("G{i}B"))).collect();
        let pr: Vec<bool> = (0..4).map(|i| !p.bit_in(&format!("P{i}B"))).collect();
        let mut carry = p.bit_in("CN");
        let mut carries = Vec::new();
        for i in 0..4 {
            carry = g[i] || (pr[i] && carry);
            carries.push(carry);
        }
        assert_eq!(p.bit_out("CNX"), carries[0]);
        assert_eq!(p.bit_out("CNY"), carries[1]);
        assert_eq!(p.bit_out("CNZ"), carries[2]);
        let group_g = g[3] || (pr[3] && (g[2] || (pr[2] && (g[1] || (pr[1] && g[0])))));
        assert_eq!(p.bit_out("GB"), !group_g);
        assert_eq!(p.bit_out("PB"), !pr.iter().all(|&x| x));
    });
}

#[test]
fn chip_74l85_compares() {
    let c = chip("74L85").unwrap();
    exhaust(&c, |p| {
        let a = p.word_in("A", 4);
        let b = p.word_in("B", 4);
        let (gt, eq, lt) = (p.bit_in("IAGB"), p.bit_in("IAEB"), p.bit_in("IALB"));
        let want = match a.cmp(&b) {
            std::cmp::Ordering::Greater => (true, false, false),
            std::cmp::Ordering::Less => (false, false, true),
            std::cmp::Ordering::Equal if eq => (false, true, false),
            std::cmp::Ordering::Equal => (!lt, false, !gt),
        };
        assert_eq!(
            (p.bit_out("OAGB"), p.bit_out("OAEB"), p.bit_out("OALB")),
            want
        );
    });
}

#[test]
fn chip_74181_logic_and_addition() {
    let c = chip("74181").unwrap();
    exhaust(&c, |p| {
        let a = p.word_in("A", 4);
        let b = p.word_in("B", 4);
        let s = p.word_in("S", 4);
        let f = p.word_out("F", 4);
        let m = p.bit_in("M");
        let cn = p.bit_in("CN");
        let nb = !b & 0xF;
        let na = !a & 0xF;
        if m {
            let want = match s {
                0b0000 => na,
                0b0001 => !(a | b),
                0b0010 => na & b,
                0b0011 => 0,
                0b0100 => !(a & b),
                0b0101 => nb,
                0b0110 => a ^ b,
                0b0111 => a & nb,
                0b1000 => na | b,
                0b1001 => !(a ^ b),
                0b1010 => b,
                0b1011 => a & b,
                0b1100 => 0xF,
                0b1101 => a | nb,
                0b1110 => a | b,
                _ => a,
            } & 0xF;
            assert_eq!(f, want, "logic S={s:04b}");
        } else if s == 0b1001 {
            let sum = a + b + u64::from(!cn);
            assert_eq!(f, sum & 0xF);
            assert_eq!(p.bit_out("CN4"), sum < 16);
            assert_eq!(p.bit_out("PB"), !(a | b == 0xF));
        }
        assert_eq!(p.bit_out("AEQB"), f == 0xF);
    });
}

#[test]
fn bitonic_sorter_sorts() {
    for n in 1..=8 {
        let c = bitonic_sorter(n);
        assert!(c.validate().is_ok());
        exhaust(&c, |p| {
            let ones = (0..n).filter(|i| p.bit_in(&format!("x{i}"))).count();
            for j in 0..n {
                assert_eq!(p.bit_out(&format!("y{j}")), j >= n - ones, "n={n}");
            }
        });
    }
    assert_eq!(bitonic_sorter(4).gate_count(), 6);
}
