//! A moving box written as the difference of two truncated tubes, checked
//! on a grid of sample points.

use spectra_census::regions::{box_as_tube_difference, in_box_window, in_truncated_tube, BoxShape};

fn main() {
    let v = vec![0.6, 0.8];
    let eps = vec![0.5, 1.0];
    let time = 5.0;
    let (far, near) = box_as_tube_difference(&v, &eps, time).unwrap();
    let window = BoxShape::new(v.clone(), eps.clone()).unwrap().at(time);
    let mut inside = 0;
    let mut agree = 0;
    let n = 200;
    for i in 0..n {
        for j in 0..n {
            let x = [2.0 + 2.0 * (i as f64 + 0.5) / n as f64, 3.0 + 3.0 * (j as f64 + 0.5) / n as f64];
            let a = in_box_window(&x, &window).unwrap();
            let b = in_truncated_tube(&x, &far).unwrap() && !in_truncated_tube(&x, &near).unwrap();
            inside += a as usize;
            agree += (a == b) as usize;
        }
    }
    println!("{inside} of {} sample points in the box; descriptions agree on {agree}", n * n);
}
