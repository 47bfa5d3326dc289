#![allow(dead_code)]

use num_integer::Roots;

/// Smallest `y >= 1` (with its `x` and norm sign) such that `x^2 - d y^2 = -4`
/// or `+4`, found by an ascending scan over `y <= limit`. At equal `y` the
/// norm `-1` solution is the smaller unit.
///
/// The scan walks a wheel of residues mod `64*9*5*7*11*13` that can make
/// `d y^2 -+ 4` a square, then rejects candidates with square tables for the
/// primes 17..37 before taking an integer square root.
pub fn pell_scan(d: u64, limit: u64) -> Option<(u128, u64, i32)> {
    let minus = scan_sign(d, limit, -4);
    let bound = minus.map_or(limit, |(_, y)| y);
    let plus = scan_sign(d, bound, 4);
    match (minus, plus) {
        (_, Some((x, y))) if minus.is_none_or(|(_, ym)| y < ym) => Some((x, y, 1)),
        (Some((x, y)), _) => Some((x, y, -1)),
        _ => None,
    }
}

const WHEEL: [u64; 6] = [64, 9, 5, 7, 11, 13];
const FILTER: [u64; 6] = [17, 19, 23, 29, 31, 37];

fn squares_mod(m: u64) -> Vec<bool> {
    let mut sq = vec![false; m as usize];
    for x in 0..m {
        sq[(x * x % m) as usize] = true;
    }
    sq
}

fn admissible(d: u64, m: u64, c: i64) -> Vec<bool> {
    let sq = squares_mod(m);
    (0..m)
        .map(|y| {
            let v = ((d % m) * (y * y % m)) as i64 + c;
            sq[v.rem_euclid(m as i64) as usize]
        })
        .collect()
}

fn inverse(a: u64, m: u64) -> u64 {
    (1..m).find(|&x| a * x % m == 1).expect("coprime moduli")
}

fn scan_sign(d: u64, limit: u64, c: i64) -> Option<(u128, u64)> {
    let mut residues = vec![0u64];
    let mut modulus = 1u64;
    for &m in &WHEEL {
        let ok = admissible(d, m, c);
        let inv = inverse(modulus % m, m);
        let mut next = Vec::new();
        for &r in &residues {
            for s in (0..m).filter(|&s| ok[s as usize]) {
                let t = ((s + m - r % m) % m) * inv % m;
                next.push(r + modulus * t);
            }
        }
        modulus *= m;
        residues = next;
    }
    residues.sort_unstable();
    let tables: Vec<Vec<bool>> = FILTER.iter().map(|&q| admissible(d, q, c)).collect();
    let offsets: Vec<[u8; 6]> = residues
        .iter()
        .map(|&r| {
            let mut o = [0u8; 6];
            for (k, &q) in FILTER.iter().enumerate() {
                o[k] = (r % q) as u8;
            }
            o
        })
        .collect();
    let mut base = 0u64;
    while base <= limit {
        let base_mod: Vec<u8> = FILTER.iter().map(|&q| (base % q) as u8).collect();
        'cand: for (i, &r) in residues.iter().enumerate() {
            let y = base + r;
            if y > limit {
                break;
            }
            if y == 0 {
                continue;
            }
            for k in 0..FILTER.len() {
                let q = FILTER[k] as u8;
                let mut t = base_mod[k] + offsets[i][k];
                if t >= q {
                    t -= q;
                }
                if !tables[k][t as usize] {
                    continue 'cand;
                }
            }
            let v = (d as u128) * (y as u128) * (y as u128);
            let v = if c < 0 { v - 4 } else { v + 4 };
            let x = v.sqrt();
            if x * x == v {
                return Some((x, y));
            }
        }
        base += modulus;
    }
    None
}
