use advlab_core::adversary::{availability_table, Availability, BoxCase};
use advlab_core::Partition;

fn padded(n: usize, first_less: usize, rest: &[usize]) -> Partition {
    let mut rows = vec![n - first_less];
    rows.extend_from_slice(rest);
    Partition::new(rows).unwrap()
}

/// `(N - a, rest)`.
type Row = (usize, Vec<usize>);
/// Availability and case, or blank.
type Cell = Option<(Availability, usize)>;

fn expected() -> Vec<(Row, Vec<Cell>)> {
    use Availability::{Double as D, Single as S};
    vec![
        ((0, vec![]), vec![Some((S, 1)), None, None, None]),
        ((1, vec![1]), vec![Some((D, 2)), Some((S, 1)), None, None]),
        ((2, vec![2]), vec![Some((S, 3)), Some((D, 2)), Some((S, 1)), None]),
        ((2, vec![1, 1]), vec![None, Some((D, 2)), None, Some((S, 1))]),
        ((3, vec![3]), vec![None, Some((S, 3)), Some((D, 2)), None]),
        ((3, vec![2, 1]), vec![None, Some((D, 3)), Some((D, 2)), Some((D, 2))]),
        ((3, vec![1, 1, 1]), vec![None, None, None, Some((D, 2))]),
        ((4, vec![4]), vec![None, None, Some((S, 3)), None]),
        ((4, vec![3, 1]), vec![None, None, Some((D, 3)), Some((S, 3))]),
        ((4, vec![2, 2]), vec![None, None, Some((S, 3)), None]),
        ((4, vec![2, 1, 1]), vec![None, None, None, Some((D, 3))]),
    ]
}

#[test]
fn table_of_available_operators() {
    let columns: [(usize, &[usize]); 4] = [(2, &[]), (3, &[1]), (4, &[2]), (4, &[1, 1])];
    for n in 8..=12 {
        let table = availability_table(n).unwrap();
        for ((a, rest), cells) in expected() {
            let lambda = padded(n, a, &rest);
            for ((b, nrest), cell) in columns.iter().zip(&cells) {
                let nu = padded(n, *b, nrest);
                let got = table
                    .iter()
                    .find(|e| e.lambda == lambda && e.nu == nu)
                    .map(|e| (e.availability, e.case.number()));
                assert_eq!(got, *cell, "N={n} lambda={lambda} nu={nu}");
            }
        }
    }
}

#[test]
fn cases_follow_boxes_below_first_row() {
    for e in availability_table(7).unwrap() {
        let below = e.lambda.size() - e.lambda.first_row();
        let below_nu = e.nu.size() - e.nu.first_row();
        assert_eq!(e.case, BoxCase::from_number(below - below_nu + 1).unwrap());
    }
}
