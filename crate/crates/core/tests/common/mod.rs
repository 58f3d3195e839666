#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::OnceLock;

use knotscan::laurent::Laurent;
use knotscan::table::{builtin_table, KnotRecord};

pub const TREFOIL: &str = "PD[X[1,5,2,4],X[3,1,4,6],X[5,3,6,2]]";
pub const FIGURE_EIGHT: &str = "PD[X[4,2,5,1],X[8,6,1,5],X[6,3,7,4],X[2,7,3,8]]";

pub fn records() -> &'static [KnotRecord] {
    static R: OnceLock<Vec<KnotRecord>> = OnceLock::new();
    R.get_or_init(|| builtin_table().expect("shipped table loads"))
}

/// Parses a polynomial in `t` written like `t^(-2)-t^(-1)+1-2*t+t^2`.
pub fn parse_t_poly(text: &str) -> Vec<(i64, i32)> {
    let s: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut i = 0;
    let mut out = Vec::new();
    let number = |i: &mut usize| -> i64 {
        let start = *i;
        while *i < s.len() && s[*i].is_ascii_digit() {
            *i += 1;
        }
        s[start..*i].iter().collect::<String>().parse().unwrap()
    };
    while i < s.len() {
        let mut sign = 1;
        if s[i] == '+' || s[i] == '-' {
            sign = if s[i] == '-' { -1 } else { 1 };
            i += 1;
        }
        let mut coeff = 1;
        if s[i].is_ascii_digit() {
            coeff = number(&mut i);
            if i < s.len() && s[i] == '*' {
                i += 1;
            }
        }
        let mut exp = 0;
        if i < s.len() && s[i] == 't' {
            i += 1;
            exp = 1;
            if i < s.len() && s[i] == '^' {
                i += 1;
                let paren = s[i] == '(';
                if paren {
                    i += 1;
                }
                let mut esign = 1;
                if s[i] == '-' {
                    esign = -1;
                    i += 1;
                }
                exp = esign * number(&mut i) as i32;
                if paren {
                    assert_eq!(s[i], ')');
                    i += 1;
                }
            }
        }
        out.push((sign * coeff, exp));
    }
    out
}

/// Reference Jones values from KnotInfo, converted with `t = q⁻¹`.
pub fn reference_jones() -> &'static BTreeMap<String, Laurent> {
    static J: OnceLock<BTreeMap<String, Laurent>> = OnceLock::new();
    J.get_or_init(|| {
        let mut rdr = csv::Reader::from_reader(include_str!("../data/knotinfo_jones.csv").as_bytes());
        rdr.records()
            .map(|r| {
                let r = r.unwrap();
                let terms = parse_t_poly(&r[1]).into_iter().map(|(c, e)| (c, -2 * e));
                (r[0].to_string(), Laurent::from_terms(terms))
            })
            .collect()
    })
}

#[test]
fn t_parser() {
    assert_eq!(parse_t_poly("t+t^3-t^4"), vec![(1, 1), (1, 3), (-1, 4)]);
    assert_eq!(parse_t_poly("t^(-2)-t^(-1)+1-2*t"), vec![(1, -2), (-1, -1), (1, 0), (-2, 1)]);
}
