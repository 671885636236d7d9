"""From survey row to filtered feature vector, step by step.

Shows the 53-feature one-hot contract, the running variances behind the
streaming selector, and which indicators a frozen 5th-percentile threshold
keeps for a concrete sample.

Run:  python3 demos/feature_pipeline.py
"""

from ppdstream.encoding import FEATURE_SPACE, encode_record, feature_display
from ppdstream.selection import SelectorConfig, StreamSelector, cold_start_size
from ppdstream.synthetic import generate_records


def main():
    stream = generate_records(n_total=400, n_absence=140, seed=8)
    n_cold = cold_start_size(len(stream), 0.10)

    record = stream[0]
    sample = encode_record(record)
    print(f"feature space: {len(FEATURE_SPACE)} Boolean indicators")
    print(f"first record encodes to {len(sample)} active features:")
    for name in sample:
        print(f"  {name:55s} {feature_display(name)}")
    print()

    selector = StreamSelector(config=SelectorConfig())
    for r in stream[:n_cold]:
        selector.transform(encode_record(r))
    threshold = selector.freeze()
    print(f"cold start: {n_cold} samples -> threshold {threshold:.4f} "
          f"(5th percentile of per-feature variances)")

    variances = selector.tracker.variances()
    dropped = sorted(f for f, v in variances.items() if v < threshold)
    print(f"{len(dropped)} features currently under the threshold:")
    for name in dropped:
        print(f"  {name:55s} variance {variances[name]:.4f}")
    print()

    filtered = selector.transform(encode_record(stream[n_cold]))
    print(f"next sample keeps {len(filtered)}/{len(encode_record(stream[n_cold]))} "
          f"active features after filtering")


if __name__ == "__main__":
    main()
