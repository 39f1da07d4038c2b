#![no_main]

use libfuzzer_sys::fuzz_target;
use ramsey_zne_cli::csv_io::CsvTable;
use ramsey_zne_cli::svg::{render_plot, PlotSpec};

// The CSV reader and plot renderer must tolerate arbitrary input.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(table) = CsvTable::parse(text) {
        let _ = render_plot(&table, PlotSpec { log_y: false });
        let _ = render_plot(&table, PlotSpec { log_y: true });
        // reserialize and reparse: the writer's output must stay parseable
        let round = table.to_csv_string();
        let reparsed = CsvTable::parse(&round).expect("writer output must reparse");
        assert_eq!(reparsed.header, table.header);
        assert_eq!(reparsed.rows.len(), table.rows.len());
    }
});
