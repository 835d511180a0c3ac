//! Levi-Civita connection of the Eguchi-Hanson metric in its coframe: the
//! closed-form table next to the Koszul formula and chart Christoffels.

use holonomy_forge::geometry::{frame_connection_table, frame_connection_table_chart};
use holonomy_forge::zoo::EguchiHansonModel;

fn main() -> holonomy_forge::Result<()> {
    let eh = EguchiHansonModel::new(1.0);
    let model = eh.model();
    let p = [1.5, 1.2, 0.7, 2.0];
    let n = model.dim;
    let closed = eh.connection_table(p[0]);
    let koszul = frame_connection_table(&model, &p)?;
    let chart = frame_connection_table_chart(&model, &p)?;
    println!("gamma(r = {}) = {:.12}", p[0], eh.gamma(p[0]));
    println!("{:<10} {:<14} {:>16} {:>12} {:>12}", "(i,j,k)", "formula", "closed form", "koszul", "chart");
    for ((i, j, k), label) in EguchiHansonModel::connection_labels() {
        let at = (i * n + j) * n + k;
        println!(
            "({i},{j},{k})    {label:<14} {:>16.12} {:>12.3e} {:>12.3e}",
            closed[at],
            (koszul[at] - closed[at]).abs(),
            (chart[at] - closed[at]).abs()
        );
    }
    Ok(())
}
