"""The harder missing-data pattern: whole rows lose every label.

On top of the random feature/label mask, 10% of the instances are chosen
as a block and stripped of ALL their label observations. Those rows are
the test set; nothing about their label zone is seen at train time, so
completion must lean entirely on the feature zone and the low-rank
coupling. Scores drop well below the random-scenario numbers, which is
the point of the comparison.
"""

from smoothrank import ExperimentSpec, Method, SolverConfig, load_arff, render_report, run_experiment

SPG_TUNED = SolverConfig(delta_decay=0.7, alpha_max=1.0, max_inner_iters=3)

# CAL500 has 174 labels on 502 rows; with whole rows blanked the schedule
# is stopped earlier (10 stages) because past that point the deep-delta
# stages start collapsing the unconstrained label rows toward zero.
CAL500_SPG = SolverConfig(
    delta_decay=0.7, alpha_max=1.0, max_inner_iters=3, max_outer_iters=10
)

rows = []
for path, rate, config in (
    ("data/emotions.arff", 0.8, SPG_TUNED),
    ("data/cal500.arff", 0.6, CAL500_SPG),
):
    ds = load_arff(path)
    spec = ExperimentSpec(
        dataset=ds,
        method=Method.SPG,
        scenario="block",
        observation_rates=(rate,),
        trials=10,
        config=config,
    )
    rows.extend(run_experiment(spec))
    print(f"done: {ds.name}")

table, _ = render_report(rows)
print()
print(table)
print("\nEvery test row had zero observed labels during the solve.")
