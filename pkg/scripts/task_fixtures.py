"""Mini-corpus task definitions plus the scripted stage content for each.

Every fixture carries enough material to drive a full pipeline run offline:
five candidate implementations (three correct, two with designed bugs),
refinement outputs for the buggy ones, synthetic inputs that trigger each
bug, and one deliberately wrong expected output per task so reverse review
always has something to discard. Expected assertion outputs are computed by
executing the task's expert solution at corpus-build time.

Synthetic inputs are chosen to be textually disjoint from every hidden test,
so the prompt firewall scan cannot collide on identical assertion strings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional


@dataclass
class TaskFixture:
    task_id: str
    description: str
    entry_point: str
    difficulty: str
    hidden_tests: list[str]
    expert: str
    baselines: list[str]
    formalization: dict[str, str]
    plans: list[tuple[str, str]]
    suggestions: list[str]
    candidates: list[str]            # exactly 5, candidate i <- plans[i]
    refine_map: dict[str, str]       # broken code -> refined code
    synth_inputs: list[str]          # argument strings; may contain duplicates
    wrong_outputs: dict[str, str]    # argument string -> wrong expected literal
    unparseable_review: set[str] = field(default_factory=set)
    formalize_retry: bool = False
    select_preference: int = 1
    level_weights: Optional[dict[int, float]] = None


def _generic_suggestions(topic: str, count: int = 20) -> list[str]:
    pool = [
        f"Use built-in functions instead of hand-rolled loops when {topic}.",
        "Use the built-in pow function with a modulus argument instead of a "
        "manual binary exponentiation loop.",
        "Apply the Miller-Rabin primality test instead of full trial division "
        "when numbers grow large.",
        "Prefer list comprehensions over repeated append calls in hot loops.",
        "Hoist attribute lookups out of loops by binding methods to locals.",
        "Use collections.deque for queue operations instead of list.pop(0).",
        "Replace membership tests on lists with sets or dicts for O(1) lookup.",
        "Avoid building intermediate lists; use generators where possible.",
        "Use enumerate instead of manual index counters.",
        "Short-circuit early when the answer is already determined.",
        "Use bytearray or integer bitmasks for dense boolean tables.",
        "Batch work to minimize interpreter overhead per element.",
        "Use functools.lru_cache for overlapping subproblems.",
        "Sort once and reuse the sorted order instead of re-sorting.",
        "Use str.join for string accumulation instead of +=.",
        "Use heapq.nsmallest/nlargest instead of sorting when only a few "
        "items are needed.",
        "Prefer tuple unpacking over index juggling for pair updates.",
        "Keep the working set small: prune states that cannot contribute.",
        "Use itertools to move loops into C where the pattern fits.",
        "Measure before and after; keep the asymptotically better variant.",
        "Avoid copying large lists inside loops; index into the original.",
        "Use dict.fromkeys to deduplicate while preserving order.",
    ]
    return pool[:count]


# --------------------------------------------------------------------------
# 1. prime_fib (hard) - the designated task for variant-graph fixtures
# --------------------------------------------------------------------------

PRIME_FIB_EXPERT = '''def prime_fib(n):
    def is_prime(p):
        if p < 2:
            return False
        if p % 2 == 0:
            return p == 2
        if p % 3 == 0:
            return p == 3
        step = 5
        while step * step <= p:
            if p % step == 0 or p % (step + 2) == 0:
                return False
            step += 6
        return True

    previous, current = 1, 2
    while True:
        if is_prime(current):
            n -= 1
            if n == 0:
                return current
        previous, current = current, previous + current'''

PRIME_FIB_BASELINE = '''def prime_fib(n):
    def is_prime(p):
        if p < 2:
            return False
        divisor = 2
        while divisor * divisor <= p:
            if p % divisor == 0:
                return False
            divisor += 1
        return True

    previous, current = 1, 2
    while True:
        if is_prime(current):
            n -= 1
            if n == 0:
                return current
        previous, current = current, previous + current'''

PRIME_FIB_MILLER_RABIN = '''def prime_fib(n):
    def is_prime(p):
        if p < 2:
            return False
        for small in (2, 3, 5, 7, 11, 13, 17):
            if p % small == 0:
                return p == small
        d, r = p - 1, 0
        while d % 2 == 0:
            d //= 2
            r += 1
        for base in (2, 3, 5, 7, 11, 13, 17):
            x = pow(base, d, p)
            if x in (1, p - 1):
                continue
            for _ in range(r - 1):
                x = x * x % p
                if x == p - 1:
                    break
            else:
                return False
        return True

    previous, current = 1, 2
    while True:
        if is_prime(current):
            n -= 1
            if n == 0:
                return current
        previous, current = current, previous + current'''

# Trial division capped at 30: composites whose smallest factor exceeds the
# cap (first such Fibonacci number: 4181 = 37 * 113) pass as "prime", which
# shifts every answer from n = 8 onward.
PRIME_FIB_CAPPED = '''def prime_fib(n):
    def is_prime(p):
        if p < 2:
            return False
        divisor = 2
        while divisor * divisor <= p and divisor <= 30:
            if p % divisor == 0:
                return False
            divisor += 1
        return True

    previous, current = 1, 2
    while True:
        if is_prime(current):
            n -= 1
            if n == 0:
                return current
        previous, current = current, previous + current'''

PRIME_FIB_CAPPED_FIX = '''def prime_fib(n):
    def is_prime(p):
        if p < 2:
            return False
        factor = 2
        while factor * factor <= p:
            if p % factor == 0:
                return False
            factor += 1
        return True

    previous, current = 1, 2
    while True:
        if is_prime(current):
            n -= 1
            if n == 0:
                return current
        previous, current = current, previous + current'''

# Wrongly "optimized" base case: the second prime Fibonacci number is 3, not 2.
PRIME_FIB_BASE_CASE = '''def prime_fib(n):
    if n == 2:
        return 2
    def is_prime(p):
        if p < 2:
            return False
        if p % 2 == 0:
            return p == 2
        step = 3
        while step * step <= p:
            if p % step == 0:
                return False
            step += 2
        return True

    previous, current = 1, 2
    while True:
        if is_prime(current):
            n -= 1
            if n == 0:
                return current
        previous, current = current, previous + current'''

PRIME_FIB_BASE_CASE_FIX = '''def prime_fib(n):
    def is_prime(p):
        if p < 2:
            return False
        if p % 2 == 0:
            return p == 2
        step = 3
        while step * step <= p:
            if p % step == 0:
                return False
            step += 2
        return True

    previous, current = 1, 2
    while True:
        if is_prime(current):
            n -= 1
            if n == 0:
                return current
        previous, current = current, previous + current'''

PRIME_FIB = TaskFixture(
    task_id="prime_fib",
    description=(
        "Write a function prime_fib(n) that returns the n-th number that is "
        "both a Fibonacci number and a prime number. Counting starts at "
        "n = 1, whose answer is 2 (the first Fibonacci number that is "
        "prime). n is a positive integer."
    ),
    entry_point="prime_fib",
    difficulty="hard",
    hidden_tests=[
        "assert prime_fib(1) == 2",
        "assert prime_fib(3) == 5",
        "assert prime_fib(5) == 89",
        "assert prime_fib(8) == 28657",
        "assert prime_fib(10) == 433494437",
        "assert prime_fib(11) == 2971215073",
    ],
    expert=PRIME_FIB_EXPERT,
    baselines=[PRIME_FIB_BASELINE],
    formalization={
        "io_conditions": "takes a positive integer n and returns an integer",
        "parameter_types": "n: int (1-indexed rank)",
        "edge_cases": "n = 1 returns 2; large n means very large Fibonacci values",
        "expected_behavior": (
            "returns the n-th number that is both a Fibonacci number and a "
            "prime number, counting 2 as the first"
        ),
    },
    plans=[
        ("generate Fibonacci numbers in order and test each with 6k plus or "
         "minus 1 trial division, O(sqrt(F)) per candidate",
         "keep the last two Fibonacci numbers; advance; when the current "
         "value is prime, decrement n; return when n reaches zero"),
        ("generate Fibonacci numbers and test primality with deterministic "
         "Miller-Rabin, O(log F) multiplications per test",
         "advance the Fibonacci pair; run Miller-Rabin witnesses on each "
         "value; count the primes until the n-th"),
        ("use the closed-form Binet expression to enumerate Fibonacci values "
         "by index, O(1) per index with integer rounding",
         "for k = 1, 2, ...: compute round(phi**k / sqrt(5)); test primality; "
         "count matches"),
        ("pre-sieve small primes to shortcut trial division on each "
         "Fibonacci value",
         "sieve primes below a bound; divide each Fibonacci value by sieved "
         "primes before falling back to direct checks"),
        ("only test Fibonacci indices that can yield primes: F(k) prime "
         "requires k prime or k = 4",
         "iterate candidate indices k (primes and 4); generate F(k) by fast "
         "doubling; primality-test F(k) alone"),
    ],
    suggestions=_generic_suggestions("testing primality"),
    candidates=[
        PRIME_FIB_EXPERT,
        PRIME_FIB_MILLER_RABIN,
        PRIME_FIB_CAPPED,
        PRIME_FIB_BASELINE,
        PRIME_FIB_BASE_CASE,
    ],
    refine_map={
        PRIME_FIB_CAPPED: PRIME_FIB_CAPPED_FIX,
        PRIME_FIB_BASE_CASE: PRIME_FIB_BASE_CASE_FIX,
    },
    synth_inputs=["2", "4", "6", "7", "9", "2", "6", "4"],  # 5 unique
    wrong_outputs={"4": "12"},
    select_preference=2,
    level_weights={0: 1.0, 1: 1.0, 2: 1.0, 3: 1.0, 4: 8.0, 5: 8.0},
)

# --------------------------------------------------------------------------
# 2. find_the_median (easy)
# --------------------------------------------------------------------------

MEDIAN_EXPERT = '''def find_the_median(arr):
    ordered = sorted(arr)
    n = len(ordered)
    mid = n // 2
    if n % 2:
        return float(ordered[mid])
    return (ordered[mid - 1] + ordered[mid]) / 2'''

MEDIAN_BASELINE = '''def find_the_median(arr):
    remaining = list(arr)
    picked = []
    for _ in range(len(remaining) // 2 + 1):
        smallest = min(remaining)
        remaining.remove(smallest)
        picked.append(smallest)
    if len(arr) % 2:
        return float(picked[-1])
    return (picked[-2] + picked[-1]) / 2'''

MEDIAN_STATISTICS = '''import statistics

def find_the_median(arr):
    return float(statistics.median(arr))'''

MEDIAN_EVEN_BUG = '''def find_the_median(arr):
    ordered = sorted(arr)
    return float(ordered[len(ordered) // 2])'''

MEDIAN_EVEN_FIX = '''def find_the_median(arr):
    ordered = sorted(arr)
    n = len(ordered)
    mid = n // 2
    if n % 2 == 1:
        return float(ordered[mid])
    return (ordered[mid - 1] + ordered[mid]) / 2.0'''

MEDIAN_NO_SORT = '''def find_the_median(arr):
    n = len(arr)
    mid = n // 2
    if n % 2:
        return float(arr[mid])
    return (arr[mid - 1] + arr[mid]) / 2'''

MEDIAN_NO_SORT_FIX = '''def find_the_median(arr):
    values = sorted(arr)
    n = len(values)
    mid = n // 2
    if n % 2:
        return float(values[mid])
    return (values[mid - 1] + values[mid]) / 2'''

FIND_THE_MEDIAN = TaskFixture(
    task_id="find_the_median",
    description=(
        "Given an unsorted array of integers arr, find the median of the "
        "array. The median is the middle value in an ordered list of "
        "numbers. If the length of the array is even, then the median is "
        "the average of the two middle numbers. Implement "
        "find_the_median(arr) and return the median as a float."
    ),
    entry_point="find_the_median",
    difficulty="easy",
    hidden_tests=[
        "assert find_the_median([3, 1, 2]) == 2.0",
        "assert find_the_median([4, 1, 3, 2]) == 2.5",
        "assert find_the_median([-7]) == -7.0",
        "assert find_the_median([i * 2654435761 % 1000003 for i in range(3000)]) == 501633.5",
        "assert find_the_median([i * 48271 % 65537 for i in range(3500)]) == 32756.0",
    ],
    expert=MEDIAN_EXPERT,
    baselines=[MEDIAN_BASELINE],
    formalization={
        "io_conditions": "takes an unsorted list of integers, returns a float",
        "parameter_types": "arr: List[int], non-empty",
        "edge_cases": "single element, duplicates, negative numbers, even length",
        "expected_behavior": (
            "find the median of the array; for even lengths the average of "
            "the two middle numbers"
        ),
    },
    plans=[
        ("sort the array and read the middle, O(n log n)",
         "sort; if odd return middle; else average the two middles"),
        ("use the standard library median routine, O(n log n)",
         "delegate to a vetted median implementation and convert to float"),
        ("quickselect the middle order statistics, O(n) expected",
         "partition around pivots until the middle index is fixed"),
        ("heap-select the smallest half, O(n log k)",
         "take the n//2 + 1 smallest items; combine the last one or two"),
        ("counting-bucket the values when the range is small, O(n + R)",
         "bucket counts; walk buckets to the middle rank"),
    ],
    suggestions=_generic_suggestions("selecting order statistics"),
    candidates=[
        MEDIAN_EXPERT,
        MEDIAN_STATISTICS,
        MEDIAN_EVEN_BUG,
        MEDIAN_BASELINE,
        MEDIAN_NO_SORT,
    ],
    refine_map={
        MEDIAN_EVEN_BUG: MEDIAN_EVEN_FIX,
        MEDIAN_NO_SORT: MEDIAN_NO_SORT_FIX,
    },
    synth_inputs=[
        "[1]", "[3, 1, 4]", "[1, 2, 3, 4]", "[7]", "[-5, -1, -3]",
        "[2, 4, 6, 8]", "[10, 20]", "[9, 9, 9]", "[6, 10]",
    ],
    wrong_outputs={"[6, 10]": "6.0"},
    select_preference=1,
    level_weights={0: 1.0, 1: 1.0, 2: 1.0, 3: 8.0, 4: 8.0},
)

# --------------------------------------------------------------------------
# 3. dedup_preserve_order (easy) - refinement-regression fixture
# --------------------------------------------------------------------------

DEDUP_EXPERT = '''def dedup_preserve_order(items):
    seen = set()
    result = []
    for item in items:
        if item not in seen:
            seen.add(item)
            result.append(item)
    return result'''

DEDUP_FROMKEYS = '''def dedup_preserve_order(items):
    return list(dict.fromkeys(items))'''

DEDUP_BASELINE = '''def dedup_preserve_order(items):
    result = []
    for item in items:
        if item not in result:
            result.append(item)
    return result'''

DEDUP_LAST_OCCURRENCE = '''def dedup_preserve_order(items):
    result = []
    for item in items:
        if item in result:
            result.remove(item)
        result.append(item)
    return result'''

DEDUP_LAST_OCCURRENCE_FIX = '''def dedup_preserve_order(items):
    result = []
    known = set()
    for item in items:
        if item in known:
            continue
        known.add(item)
        result.append(item)
    return result'''

DEDUP_EMPTY_CRASH = '''def dedup_preserve_order(items):
    result = [items[0]]
    seen = {items[0]}
    for item in items[1:]:
        if item not in seen:
            seen.add(item)
            result.append(item)
    return result'''

# A regression: the "fix" guts the function. The max rule must keep the
# original empty-crash version (which at least passes the non-empty tests).
DEDUP_EMPTY_CRASH_BAD_FIX = '''def dedup_preserve_order(items):
    unique = []
    return unique'''

DEDUP = TaskFixture(
    task_id="dedup_preserve_order",
    description=(
        "Write dedup_preserve_order(items) that returns a new list with "
        "duplicate values removed, keeping only the first occurrence of "
        "each value and preserving the original order. Values are hashable "
        "and the input may be empty."
    ),
    entry_point="dedup_preserve_order",
    difficulty="easy",
    hidden_tests=[
        "assert dedup_preserve_order([1, 2, 1, 3]) == [1, 2, 3]",
        "assert dedup_preserve_order([5, 5, 5, 5]) == [5]",
        'assert dedup_preserve_order(["b", "a", "b"]) == ["b", "a"]',
        "assert dedup_preserve_order([9, 8, 9, 8, 7]) == [9, 8, 7]",
        "assert dedup_preserve_order(list(range(2000)) * 3) == list(range(2000))",
    ],
    expert=DEDUP_EXPERT,
    baselines=[DEDUP_BASELINE],
    formalization={
        "io_conditions": "takes a list of hashable values, returns a new list",
        "parameter_types": "items: list (possibly empty)",
        "edge_cases": "empty list, all duplicates, mixed types",
        "expected_behavior": (
            "remove duplicates keeping the first occurrence of each value "
            "and preserving the original order"
        ),
    },
    plans=[
        ("track seen values in a set while walking once, O(n)",
         "seen = empty set; append unseen items; skip seen ones"),
        ("use dict key insertion order as the dedup structure, O(n)",
         "build dict.fromkeys(items); return its keys as a list"),
        ("walk with an ordered result and membership checks, O(n^2) but tiny "
         "constants for short inputs",
         "append item when not already in the result list"),
        ("sort with original indices and keep first per group, O(n log n)",
         "pair items with indices; group equal values; keep smallest index; "
         "restore order"),
        ("stream through itertools.groupby after stable keying, O(n log n)",
         "key items; group; emit first of each group in first-seen order"),
    ],
    suggestions=_generic_suggestions("deduplicating sequences"),
    candidates=[
        DEDUP_EXPERT,
        DEDUP_FROMKEYS,
        DEDUP_LAST_OCCURRENCE,
        DEDUP_BASELINE,
        DEDUP_EMPTY_CRASH,
    ],
    refine_map={
        DEDUP_LAST_OCCURRENCE: DEDUP_LAST_OCCURRENCE_FIX,
        DEDUP_EMPTY_CRASH: DEDUP_EMPTY_CRASH_BAD_FIX,
    },
    synth_inputs=[
        "[]", "[1, 2, 1]", "[3, 3, 3]", "[1, 2, 3]", "['a', 'b', 'a']",
        "[5]", "[2, 1, 2, 1]", "[4, 4]",
    ],
    wrong_outputs={"[4, 4]": "[4, 4]"},
    select_preference=2,
    level_weights={0: 1.0, 1: 1.0, 2: 1.0, 3: 1.0, 4: 8.0},
)

# --------------------------------------------------------------------------
# 4. rolling_max_window (medium) - weighted-levels fixture
# --------------------------------------------------------------------------

ROLLING_EXPERT = '''from collections import deque

def rolling_max_window(values, k):
    if k <= 0 or k > len(values):
        return []
    window = deque()
    result = []
    for i, value in enumerate(values):
        while window and values[window[-1]] <= value:
            window.pop()
        window.append(i)
        if window[0] <= i - k:
            window.popleft()
        if i >= k - 1:
            result.append(values[window[0]])
    return result'''

ROLLING_AMORTIZED = '''def rolling_max_window(values, k):
    if k <= 0 or k > len(values):
        return []
    result = []
    current = max(values[:k])
    result.append(current)
    for i in range(k, len(values)):
        if values[i] >= current:
            current = values[i]
        elif values[i - k] == current:
            current = max(values[i - k + 1:i + 1])
        result.append(current)
    return result'''

ROLLING_BASELINE = '''def rolling_max_window(values, k):
    if k <= 0 or k > len(values):
        return []
    return [max(values[i:i + k]) for i in range(len(values) - k + 1)]'''

# Boundary bug: k == len(values) is a valid single window but is rejected.
ROLLING_BOUNDARY_BUG = '''def rolling_max_window(values, k):
    if k <= 0 or k >= len(values):
        return []
    windows = []
    for i in range(len(values) - k + 1):
        windows.append(max(values[i:i + k]))
    return windows'''

ROLLING_BOUNDARY_FIX = '''def rolling_max_window(values, k):
    if k <= 0 or k > len(values):
        return []
    windows = []
    for i in range(len(values) - k + 1):
        windows.append(max(values[i:i + k]))
    return windows'''

# Off-by-one: the final window never gets emitted.
ROLLING_LAST_WINDOW_BUG = '''def rolling_max_window(values, k):
    if k <= 0 or k > len(values):
        return []
    return [max(values[i:i + k]) for i in range(len(values) - k)]'''

ROLLING_LAST_WINDOW_FIX = '''def rolling_max_window(values, k):
    if k <= 0 or k > len(values):
        return []
    out = []
    for start in range(len(values) - k + 1):
        out.append(max(values[start:start + k]))
    return out'''

ROLLING = TaskFixture(
    task_id="rolling_max_window",
    description=(
        "Given a list of integers values and a window size k, implement "
        "rolling_max_window(values, k) returning the maximum of each "
        "contiguous window of length k as the window slides one position at "
        "a time. If k <= 0 or k is larger than the list, return []."
    ),
    entry_point="rolling_max_window",
    difficulty="medium",
    hidden_tests=[
        "assert rolling_max_window([1, 3, 2, 5], 2) == [3, 3, 5]",
        "assert rolling_max_window([6, 6], 2) == [6]",
        "assert rolling_max_window([5], 2) == []",
        "assert rolling_max_window([4, 1, 6, 3], 1) == [4, 1, 6, 3]",
        "assert rolling_max_window(list(range(3000)), 50) == list(range(49, 3000))",
        "assert rolling_max_window(list(range(3000, 0, -1)), 60) == list(range(3000, 59, -1))",
    ],
    expert=ROLLING_EXPERT,
    baselines=[ROLLING_BASELINE],
    formalization={
        "io_conditions": "takes a list of integers and a window size, returns a list",
        "parameter_types": "values: List[int]; k: int",
        "edge_cases": "k <= 0, k equal to the length, k larger than the list",
        "expected_behavior": (
            "the maximum of each contiguous window of length k in sliding "
            "order; invalid window sizes yield an empty list"
        ),
    },
    plans=[
        ("monotonic deque of candidate indices, O(n) total",
         "pop dominated tail indices; append; drop expired head; emit head"),
        ("amortized rescan only when the outgoing element was the max, O(n) "
         "amortized",
         "track current max; on evicting it, rescan the window once"),
        ("direct max per window, O(n k)",
         "for each start index take max of the slice"),
        ("block decomposition with prefix and suffix maxima, O(n)",
         "split into blocks of k; precompute prefix/suffix maxima; combine"),
        ("balanced multiset of the window contents, O(n log k)",
         "insert incoming, remove outgoing, read the largest each step"),
    ],
    suggestions=_generic_suggestions("sliding-window maxima"),
    candidates=[
        ROLLING_EXPERT,
        ROLLING_AMORTIZED,
        ROLLING_BOUNDARY_BUG,
        ROLLING_BASELINE,
        ROLLING_LAST_WINDOW_BUG,
    ],
    refine_map={
        ROLLING_BOUNDARY_BUG: ROLLING_BOUNDARY_FIX,
        ROLLING_LAST_WINDOW_BUG: ROLLING_LAST_WINDOW_FIX,
    },
    synth_inputs=[
        "[1, 3, 2], 2", "[4], 1", "[5, 1, 2, 8], 0", "[2, 2, 2], 3",
        "[9, 1, 1], 5", "[1, 2, 3, 4], 2", "[3, 1], 1", "[7, 7], 1",
    ],
    wrong_outputs={"[7, 7], 1": "[7]"},
    select_preference=1,
    level_weights={0: 1.0, 1: 1.0, 2: 1.0, 3: 1.0, 4: 8.0, 5: 8.0},
)

# --------------------------------------------------------------------------
# 5. count_inversions (medium) - unparseable-review fixture
# --------------------------------------------------------------------------

INVERSIONS_EXPERT = '''def count_inversions(values):
    def sort_count(seq):
        if len(seq) <= 1:
            return seq, 0
        mid = len(seq) // 2
        left, a = sort_count(seq[:mid])
        right, b = sort_count(seq[mid:])
        merged = []
        count = a + b
        i = j = 0
        while i < len(left) and j < len(right):
            if left[i] <= right[j]:
                merged.append(left[i])
                i += 1
            else:
                merged.append(right[j])
                count += len(left) - i
                j += 1
        merged.extend(left[i:])
        merged.extend(right[j:])
        return merged, count

    return sort_count(list(values))[1]'''

INVERSIONS_BISECT = '''from bisect import bisect_right, insort

def count_inversions(values):
    seen = []
    total = 0
    for value in values:
        total += len(seen) - bisect_right(seen, value)
        insort(seen, value)
    return total'''

INVERSIONS_BASELINE = '''def count_inversions(values):
    total = 0
    n = len(values)
    for i in range(n):
        for j in range(i + 1, n):
            if values[i] > values[j]:
                total += 1
    return total'''

# Strict merge comparison counts equal pairs as inversions.
INVERSIONS_TIE_BUG = '''def count_inversions(values):
    def sort_count(seq):
        if len(seq) <= 1:
            return seq, 0
        mid = len(seq) // 2
        left, a = sort_count(seq[:mid])
        right, b = sort_count(seq[mid:])
        merged = []
        count = a + b
        i = j = 0
        while i < len(left) and j < len(right):
            if left[i] < right[j]:
                merged.append(left[i])
                i += 1
            else:
                merged.append(right[j])
                count += len(left) - i
                j += 1
        merged.extend(left[i:])
        merged.extend(right[j:])
        return merged, count

    return sort_count(list(values))[1]'''

INVERSIONS_TIE_FIX = '''def count_inversions(values):
    def sort_count(seq):
        if len(seq) <= 1:
            return seq, 0
        mid = len(seq) // 2
        left, a = sort_count(seq[:mid])
        right, b = sort_count(seq[mid:])
        merged = []
        count = a + b
        i = j = 0
        while i < len(left) and j < len(right):
            if right[j] < left[i]:
                merged.append(right[j])
                count += len(left) - i
                j += 1
            else:
                merged.append(left[i])
                i += 1
        merged.extend(left[i:])
        merged.extend(right[j:])
        return merged, count

    return sort_count(list(values))[1]'''

# Recursive counts are dropped at every merge.
INVERSIONS_DROP_BUG = '''def count_inversions(values):
    def sort_count(seq):
        if len(seq) <= 1:
            return seq, 0
        mid = len(seq) // 2
        left, a = sort_count(seq[:mid])
        right, b = sort_count(seq[mid:])
        merged = []
        count = 0
        i = j = 0
        while i < len(left) and j < len(right):
            if left[i] <= right[j]:
                merged.append(left[i])
                i += 1
            else:
                merged.append(right[j])
                count += len(left) - i
                j += 1
        merged.extend(left[i:])
        merged.extend(right[j:])
        return merged, count

    return sort_count(list(values))[1]'''

INVERSIONS_DROP_FIX = '''def count_inversions(values):
    def sort_count(seq):
        if len(seq) <= 1:
            return seq, 0
        mid = len(seq) // 2
        left, left_count = sort_count(seq[:mid])
        right, right_count = sort_count(seq[mid:])
        merged = []
        count = left_count + right_count
        i = j = 0
        while i < len(left) and j < len(right):
            if left[i] <= right[j]:
                merged.append(left[i])
                i += 1
            else:
                merged.append(right[j])
                count += len(left) - i
                j += 1
        merged.extend(left[i:])
        merged.extend(right[j:])
        return merged, count

    return sort_count(list(values))[1]'''

INVERSIONS = TaskFixture(
    task_id="count_inversions",
    description=(
        "Implement count_inversions(values) that counts the pairs of "
        "indices i < j with values[i] > values[j] in a list of integers. "
        "Equal values do not form an inversion."
    ),
    entry_point="count_inversions",
    difficulty="medium",
    hidden_tests=[
        "assert count_inversions([2, 1]) == 1",
        "assert count_inversions([4]) == 0",
        "assert count_inversions([3, 3, 1]) == 2",
        "assert count_inversions(list(range(1000, 0, -1))) == 499500",
        "assert count_inversions(list(range(800)) + list(range(400))) == 239800",
    ],
    expert=INVERSIONS_EXPERT,
    baselines=[INVERSIONS_BASELINE],
    formalization={
        "io_conditions": "takes a list of integers, returns a non-negative integer",
        "parameter_types": "values: List[int] (possibly empty)",
        "edge_cases": "empty list, already sorted, all equal values",
        "expected_behavior": (
            "count index pairs i < j with values[i] > values[j]; ties are "
            "not inversions"
        ),
    },
    plans=[
        ("merge sort while counting cross-half inversions, O(n log n)",
         "split; recurse; during merge add left-remainder size when the "
         "right element wins"),
        ("insert into a sorted prefix and count larger predecessors with "
         "binary search, O(n log n)",
         "for each value add count of previously seen larger values via "
         "bisect; insert"),
        ("compare every pair directly, O(n^2)",
         "double loop over i < j; add one when out of order"),
        ("Fenwick tree over compressed ranks, O(n log n)",
         "compress values; walk from the right adding smaller-rank counts"),
        ("balanced search tree with subtree sizes, O(n log n)",
         "insert values; each insertion reports how many stored values "
         "exceed it"),
    ],
    suggestions=_generic_suggestions("counting ordered pairs"),
    candidates=[
        INVERSIONS_EXPERT,
        INVERSIONS_BISECT,
        INVERSIONS_TIE_BUG,
        INVERSIONS_BASELINE,
        INVERSIONS_DROP_BUG,
    ],
    refine_map={
        INVERSIONS_TIE_BUG: INVERSIONS_TIE_FIX,
        INVERSIONS_DROP_BUG: INVERSIONS_DROP_FIX,
    },
    synth_inputs=[
        "[]", "[1, 2, 3]", "[3, 3, 3]", "[4, 3, 2, 1]", "[1, 5, 2, 6]", "[2, 4]",
    ],
    wrong_outputs={"[2, 4]": "1"},
    unparseable_review={"[2, 4]"},
    select_preference=2,
    level_weights={0: 1.0, 1: 1.0, 2: 1.0, 3: 8.0, 4: 8.0},
)

# --------------------------------------------------------------------------
# 6. subset_sum_exists (hard) - short-suggestion-list fixture
# --------------------------------------------------------------------------

SUBSET_EXPERT = '''def subset_sum_exists(nums, target):
    if target < 0:
        return False
    mask = 1
    limit = (1 << (target + 1)) - 1
    for x in nums:
        if 0 < x <= target:
            mask |= mask << x
            mask &= limit
    return bool((mask >> target) & 1)'''

SUBSET_BOOL_DP = '''def subset_sum_exists(nums, target):
    if target < 0:
        return False
    reachable = [False] * (target + 1)
    reachable[0] = True
    for x in nums:
        if x <= 0 or x > target:
            continue
        for s in range(target, x - 1, -1):
            if reachable[s - x]:
                reachable[s] = True
    return reachable[target]'''

SUBSET_SET_BASELINE = '''def subset_sum_exists(nums, target):
    if target < 0:
        return False
    sums = {0}
    for x in nums:
        additions = set()
        for s in sums:
            v = s + x
            if v == target:
                return True
            if v < target:
                additions.add(v)
        sums |= additions
    return target in sums'''

# Forward iteration lets one element be reused many times.
SUBSET_REUSE_BUG = '''def subset_sum_exists(nums, target):
    if target < 0:
        return False
    reachable = [False] * (target + 1)
    reachable[0] = True
    for x in nums:
        if x <= 0 or x > target:
            continue
        for s in range(x, target + 1):
            if reachable[s - x]:
                reachable[s] = True
    return reachable[target]'''

SUBSET_REUSE_FIX = '''def subset_sum_exists(nums, target):
    if target < 0:
        return False
    possible = {0}
    for x in nums:
        new_sums = {s + x for s in possible if s + x <= target}
        possible |= new_sums
    return target in possible'''

# Missing the negative-target guard: a negative shift raises ValueError.
SUBSET_NO_GUARD = '''def subset_sum_exists(nums, target):
    mask = 1
    limit = (1 << (target + 1)) - 1
    for x in nums:
        if 0 < x <= target:
            mask |= mask << x
            mask &= limit
    return bool((mask >> target) & 1)'''

SUBSET_NO_GUARD_FIX = '''def subset_sum_exists(nums, target):
    if target < 0:
        return False
    bits = 1
    window = (1 << (target + 1)) - 1
    for x in nums:
        if 0 < x <= target:
            bits |= bits << x
            bits &= window
    return bool((bits >> target) & 1)'''

SUBSET = TaskFixture(
    task_id="subset_sum_exists",
    description=(
        "Implement subset_sum_exists(nums, target) that returns True if "
        "some subset of the non-negative integers in nums sums exactly to "
        "target, and False otherwise. The empty subset sums to 0. Each "
        "element may be used at most once. target may be negative."
    ),
    entry_point="subset_sum_exists",
    difficulty="hard",
    hidden_tests=[
        "assert subset_sum_exists([2, 3], 7) == False",
        "assert subset_sum_exists([4, 11], 15) == True",
        "assert subset_sum_exists([1], -1) == False",
        "assert subset_sum_exists(list(range(1, 150)), 11175) == True",
        "assert subset_sum_exists(list(range(1, 150)), 11176) == False",
    ],
    expert=SUBSET_EXPERT,
    baselines=[SUBSET_SET_BASELINE],
    formalization={
        "io_conditions": "takes a list of non-negative integers and a target, returns a bool",
        "parameter_types": "nums: List[int]; target: int",
        "edge_cases": "empty list, target 0, negative target, target above the total sum",
        "expected_behavior": (
            "True when some subset (each element used at most once) sums "
            "exactly to target; the empty subset covers target 0"
        ),
    },
    plans=[
        ("bitmask of reachable sums in one big integer, O(n target / w)",
         "mask starts at 1; for each x shift-or by x; answer is bit target"),
        ("backward boolean table over sums, O(n target)",
         "reachable[0] = True; iterate sums downward per element"),
        ("breadth-first set of reachable sums, O(n * |sums|)",
         "start from {0}; add x to every known sum; stop at target"),
        ("meet in the middle on the two halves, O(2^(n/2))",
         "enumerate both halves; sort one; binary-search complements"),
        ("memoized recursion on (index, remaining), O(n target) states",
         "take or skip each element; cache the outcomes"),
    ],
    suggestions=_generic_suggestions("subset-sum reachability", count=12),
    candidates=[
        SUBSET_EXPERT,
        SUBSET_BOOL_DP,
        SUBSET_REUSE_BUG,
        SUBSET_SET_BASELINE,
        SUBSET_NO_GUARD,
    ],
    refine_map={
        SUBSET_REUSE_BUG: SUBSET_REUSE_FIX,
        SUBSET_NO_GUARD: SUBSET_NO_GUARD_FIX,
    },
    synth_inputs=[
        "[2, 3], 5", "[3], 6", "[], 0", "[5, 5], 10", "[4], -2",
        "[1, 2, 4], 8", "[10, 20, 30], 60", "[6], 6",
    ],
    wrong_outputs={"[6], 6": "False"},
    select_preference=1,
    level_weights={0: 1.0, 1: 1.0, 2: 1.0, 3: 8.0, 4: 8.0},
)

# --------------------------------------------------------------------------
# 7. longest_common_subseq_len (medium) - formalization-retry fixture
# --------------------------------------------------------------------------

LCS_EXPERT = '''def longest_common_subseq_len(a, b):
    if len(b) > len(a):
        a, b = b, a
    previous = [0] * (len(b) + 1)
    for x in a:
        current = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                current.append(previous[j - 1] + 1)
            else:
                current.append(max(previous[j], current[j - 1]))
        previous = current
    return previous[len(b)]'''

LCS_FULL_TABLE = '''def longest_common_subseq_len(a, b):
    rows = len(a) + 1
    cols = len(b) + 1
    table = [[0] * cols for _ in range(rows)]
    for i in range(1, rows):
        for j in range(1, cols):
            if a[i - 1] == b[j - 1]:
                table[i][j] = table[i - 1][j - 1] + 1
            else:
                table[i][j] = max(table[i - 1][j], table[i][j - 1])
    return table[rows - 1][cols - 1]'''

LCS_MEMO_BASELINE = '''from functools import lru_cache

def longest_common_subseq_len(a, b):
    @lru_cache(maxsize=None)
    def solve(i, j):
        if i == len(a) or j == len(b):
            return 0
        if a[i] == b[j]:
            return solve(i + 1, j + 1) + 1
        return max(solve(i + 1, j), solve(i, j + 1))

    return solve(0, 0)'''

# Wrong guess for the empty-string shortcut.
LCS_EMPTY_BUG = '''def longest_common_subseq_len(a, b):
    if not a or not b:
        return max(len(a), len(b))
    rows = len(a) + 1
    cols = len(b) + 1
    table = [[0] * cols for _ in range(rows)]
    for i in range(1, rows):
        for j in range(1, cols):
            if a[i - 1] == b[j - 1]:
                table[i][j] = table[i - 1][j - 1] + 1
            else:
                table[i][j] = max(table[i - 1][j], table[i][j - 1])
    return table[rows - 1][cols - 1]'''

LCS_EMPTY_FIX = '''def longest_common_subseq_len(a, b):
    if not a or not b:
        return 0
    rows = len(a) + 1
    cols = len(b) + 1
    table = [[0] * cols for _ in range(rows)]
    for i in range(1, rows):
        for j in range(1, cols):
            if a[i - 1] == b[j - 1]:
                table[i][j] = table[i - 1][j - 1] + 1
            else:
                table[i][j] = max(table[i - 1][j], table[i][j - 1])
    return table[rows - 1][cols - 1]'''

# The last character of the first string is never considered.
LCS_DROP_LAST_BUG = '''def longest_common_subseq_len(a, b):
    rows = len(a) + 1
    cols = len(b) + 1
    table = [[0] * cols for _ in range(rows)]
    for i in range(1, rows - 1):
        for j in range(1, cols):
            if a[i - 1] == b[j - 1]:
                table[i][j] = table[i - 1][j - 1] + 1
            else:
                table[i][j] = max(table[i - 1][j], table[i][j - 1])
    return max(max(row) for row in table)'''

LCS_DROP_LAST_FIX = '''def longest_common_subseq_len(a, b):
    height = len(a) + 1
    width = len(b) + 1
    table = [[0] * width for _ in range(height)]
    for i in range(1, height):
        for j in range(1, width):
            if a[i - 1] == b[j - 1]:
                table[i][j] = table[i - 1][j - 1] + 1
            else:
                table[i][j] = max(table[i - 1][j], table[i][j - 1])
    return table[height - 1][width - 1]'''

LCS = TaskFixture(
    task_id="longest_common_subseq_len",
    description=(
        "Implement longest_common_subseq_len(a, b) returning the length of "
        "the longest common subsequence of the two strings a and b. A "
        "subsequence keeps relative order but need not be contiguous. "
        "Either string may be empty."
    ),
    entry_point="longest_common_subseq_len",
    difficulty="medium",
    hidden_tests=[
        'assert longest_common_subseq_len("", "x") == 0',
        'assert longest_common_subseq_len("abcde", "ace") == 3',
        'assert longest_common_subseq_len("same", "same") == 4',
        'assert longest_common_subseq_len("ab" * 125, "ba" * 125) == 249',
        'assert longest_common_subseq_len("x" * 200 + "y", "y" + "x" * 200) == 200',
    ],
    expert=LCS_MEMO_BASELINE,
    baselines=[LCS_EXPERT],
    formalization={
        "io_conditions": "takes two strings, returns a non-negative integer",
        "parameter_types": "a: str; b: str",
        "edge_cases": "empty strings, identical strings, disjoint alphabets, "
                      "including the empty-string case",
        "expected_behavior": (
            "length of the longest common subsequence; order preserved, "
            "contiguity not required"
        ),
    },
    plans=[
        ("two-row dynamic programming over the shorter string, O(n m) time "
         "and O(min(n, m)) space",
         "iterate rows; keep previous and current row only"),
        ("full table dynamic programming, O(n m) time and space",
         "fill table[i][j] from the three neighbors; read the corner"),
        ("memoized recursion on index pairs, O(n m) states",
         "solve(i, j) = 1 + solve(i+1, j+1) on match else best of skips"),
        ("Hunt-Szymanski over match positions, O(r log n)",
         "collect match positions per symbol; patience-sort the sequence"),
        ("bit-parallel row updates, O(n m / w)",
         "encode rows as bitmasks per symbol; update with shifts and adds"),
    ],
    suggestions=_generic_suggestions("subsequence tables"),
    candidates=[
        LCS_EXPERT,
        LCS_FULL_TABLE,
        LCS_EMPTY_BUG,
        LCS_MEMO_BASELINE,
        LCS_DROP_LAST_BUG,
    ],
    refine_map={
        LCS_EMPTY_BUG: LCS_EMPTY_FIX,
        LCS_DROP_LAST_BUG: LCS_DROP_LAST_FIX,
    },
    synth_inputs=[
        "'', 'abc'", "'abc', 'abc'", "'abc', 'axc'", "'a', 'b'",
        "'xy', 'y'", "'ab', 'ba'", "'zz', 'za'",
    ],
    wrong_outputs={"'zz', 'za'": "2"},
    formalize_retry=True,
    select_preference=4,
    level_weights={0: 1.0, 1: 1.0, 2: 1.0, 3: 8.0, 4: 8.0},
)

# --------------------------------------------------------------------------
# 8. balanced_brackets (unspecified)
# --------------------------------------------------------------------------

BRACKETS_EXPERT = '''PAIRS = {")": "(", "]": "[", "}": "{"}

def balanced_brackets(text):
    stack = []
    for ch in text:
        if ch in "([{":
            stack.append(ch)
        elif ch in PAIRS:
            if not stack or stack[-1] != PAIRS[ch]:
                return False
            stack.pop()
    return not stack'''

BRACKETS_EXPECTED_CLOSER = '''def balanced_brackets(text):
    stack = []
    openers = {"(": ")", "[": "]", "{": "}"}
    for ch in text:
        if ch in openers:
            stack.append(openers[ch])
        elif ch in ")]}":
            if not stack or stack.pop() != ch:
                return False
    return not stack'''

BRACKETS_REPLACE_BASELINE = '''def balanced_brackets(text):
    current = "".join(ch for ch in text if ch in "()[]{}")
    while True:
        reduced = current.replace("()", "").replace("[]", "").replace("{}", "")
        if reduced == current:
            return current == ""
        current = reduced'''

# Per-type counters cannot see interleaving like "([)]".
BRACKETS_COUNTER_BUG = '''def balanced_brackets(text):
    counts = {"(": 0, "[": 0, "{": 0}
    closers = {")": "(", "]": "[", "}": "{"}
    for ch in text:
        if ch in counts:
            counts[ch] += 1
        elif ch in closers:
            counts[closers[ch]] -= 1
            if counts[closers[ch]] < 0:
                return False
    return all(v == 0 for v in counts.values())'''

BRACKETS_COUNTER_FIX = '''def balanced_brackets(text):
    pending = []
    match = {")": "(", "]": "[", "}": "{"}
    for ch in text:
        if ch in "([{":
            pending.append(ch)
        elif ch in match:
            if not pending or pending[-1] != match[ch]:
                return False
            pending.pop()
    return len(pending) == 0'''

# Wrong shortcut: an empty string is balanced.
BRACKETS_EMPTY_BUG = '''def balanced_brackets(text):
    if not text:
        return False
    stack = []
    pairs = {")": "(", "]": "[", "}": "{"}
    for ch in text:
        if ch in "([{":
            stack.append(ch)
        elif ch in pairs:
            if not stack or stack[-1] != pairs[ch]:
                return False
            stack.pop()
    return not stack'''

BRACKETS_EMPTY_FIX = '''def balanced_brackets(text):
    stack = []
    pairs = {")": "(", "]": "[", "}": "{"}
    for ch in text:
        if ch in "([{":
            stack.append(ch)
        elif ch in pairs:
            if not stack or stack[-1] != pairs[ch]:
                return False
            stack.pop()
    return not stack'''

BRACKETS = TaskFixture(
    task_id="balanced_brackets",
    description=(
        "Implement balanced_brackets(text) that checks whether the round, "
        "square and curly brackets in the string text are balanced and "
        "properly nested. Non-bracket characters are ignored. An empty "
        "string is balanced."
    ),
    entry_point="balanced_brackets",
    difficulty="unspecified",
    hidden_tests=[
        'assert balanced_brackets("") == True',
        'assert balanced_brackets("([)]") == False',
        'assert balanced_brackets("(" * 4000 + ")" * 4000) == True',
        'assert balanced_brackets("{[()]}" * 1500) == True',
        'assert balanced_brackets("(" * 500) == False',
    ],
    expert=BRACKETS_EXPERT,
    baselines=[BRACKETS_REPLACE_BASELINE],
    formalization={
        "io_conditions": "takes a string, returns a bool",
        "parameter_types": "text: str (may contain non-bracket characters)",
        "edge_cases": "empty string, interleaved pairs, unmatched openers",
        "expected_behavior": (
            "True when all bracket kinds close in the right order; "
            "non-bracket characters are ignored"
        ),
    },
    plans=[
        ("stack of open brackets, O(n)",
         "push openers; on a closer compare the stack top; empty stack at "
         "the end means balanced"),
        ("stack of expected closers, O(n)",
         "push the matching closer for each opener; pop and compare on "
         "closers"),
        ("repeated cancellation of adjacent pairs, O(n^2) worst case",
         "strip non-brackets; delete adjacent matched pairs until stable"),
        ("recursive descent over bracket kinds, O(n)",
         "parse one balanced group at a time; recurse inside each opener"),
        ("index pairing with a counter per depth, O(n)",
         "track depth per kind with an explicit order tag to catch "
         "interleaving"),
    ],
    suggestions=_generic_suggestions("matching bracket pairs"),
    candidates=[
        BRACKETS_EXPERT,
        BRACKETS_EXPECTED_CLOSER,
        BRACKETS_COUNTER_BUG,
        BRACKETS_REPLACE_BASELINE,
        BRACKETS_EMPTY_BUG,
    ],
    refine_map={
        BRACKETS_COUNTER_BUG: BRACKETS_COUNTER_FIX,
        BRACKETS_EMPTY_BUG: BRACKETS_EMPTY_FIX,
    },
    synth_inputs=[
        "''", "'()'", "'([)]'", "'(('", "'[{}]'", "')('", "'{[()]}'", "'[]'",
    ],
    wrong_outputs={"'[]'": "False"},
    select_preference=1,
    level_weights={0: 1.0, 1: 1.0, 2: 8.0, 3: 8.0, 4: 1.0},
)


ALL_FIXTURES: list[TaskFixture] = [
    PRIME_FIB,
    FIND_THE_MEDIAN,
    DEDUP,
    ROLLING,
    INVERSIONS,
    SUBSET,
    LCS,
    BRACKETS,
]

DESIGNATED_TASK_ID = "prime_fib"
