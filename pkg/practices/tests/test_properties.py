"""
Randomized properties, each checked on at least 1000 seeded cases:

- value inheritance equals a naive recursive average
- the tree verdict equals a parent-count / reachability oracle
- the same-view closure equals connected components
- parse(serialize(kb)) == kb, text and JSON
- decisions are invariant under scaling adhered-value strengths
- decisions match a brute-force search over completions of small trees
- inherited strengths stay within the range of the leaf strengths
- view queries shrink as theta grows, habit activation grows with the cues

Run with:
    python manage.py test practices.tests.test_properties -v 2
"""
import random
from collections import defaultdict, deque

from django.test import SimpleTestCase

from practices import scenario
from practices.decision import DecisionConfig, PerformanceContext, decide, habit_activation
from practices.inference import infer_related_values, personal_views, same_closure, shared_views
from practices.models import (
    Activity, ActivityType, AdheredValue, Agent, Belief, ContextCue, CueKind,
    HabitualTrigger, Implementation, ImplementationType, KnowledgeBase,
    Provenance, RelatedValue, SameLink, Value,
)
from practices.validators import validate_tree

from .helpers import make_kb, make_world

CASES = 1000


def random_tree(rng, size):
    """(ids, {child: parent}, {parent: [children]}, partOf parents)."""
    ids       = [f"a{i:02d}" for i in range(size)]
    parent_of = {ids[i]: ids[rng.randrange(i)] for i in range(1, size)}
    children  = defaultdict(list)
    for child, parent in parent_of.items():
        children[parent].append(child)
    part_of = {p for p, kids in children.items() if len(kids) >= 2 and rng.random() < 0.3}
    return ids, parent_of, children, part_of


# ── Value inheritance ───────────────────────────────────────
class InheritanceOracleTest(SimpleTestCase):
    """Bottom-up averaging against a direct recursive definition."""

    def test_matches_recursive_average(self):
        rng = random.Random(1)
        for case in range(CASES):
            ids, parent_of, children, part_of = random_tree(rng, rng.randint(1, 50))
            value_ids = ["v0", "v1", "v2"][:rng.randint(1, 3)]
            asserted  = {
                (a, v): rng.random()
                for a in ids for v in value_ids if rng.random() < 0.3
            }
            kb    = make_world(
                edges=list(parent_of.items()), activities=ids, part_of=part_of, values=asserted,
            )
            table = infer_related_values(kb)

            def expected(a, v):
                kids = children.get(a)
                if not kids:
                    return asserted.get((a, v), 0.0)
                return sum(expected(c, v) for c in kids) / len(kids)

            def supported(a, v):
                kids = children.get(a)
                if not kids:
                    return (a, v) in asserted
                return any(supported(c, v) for c in kids)

            with self.subTest(case=case):
                for a in ids:
                    for v in value_ids:
                        self.assertAlmostEqual(table.strength(a, v), expected(a, v), places=12)
                        self.assertEqual((a, v) in table.entries, supported(a, v))


# ── Tree verdict ────────────────────────────────────────────
class TreeOracleTest(SimpleTestCase):
    """validate_tree against parent counts and reachability from a unique root."""

    @staticmethod
    def oracle(ids, edges):
        if not ids:
            return False
        parents  = defaultdict(set)
        children = defaultdict(set)
        for child, parent in edges:
            parents[child].add(parent)
            children[parent].add(child)
        if any(len(p) > 1 for p in parents.values()):
            return False
        roots = [a for a in ids if not parents[a]]
        if len(roots) != 1:
            return False
        reached = {roots[0]}
        queue   = deque(roots)
        while queue:
            for child in children[queue.popleft()]:
                if child not in reached:
                    reached.add(child)
                    queue.append(child)
        return reached == set(ids)

    def random_digraph(self, rng):
        size = rng.randint(0, 30)
        ids  = [f"n{i:02d}" for i in range(size)]
        if size and rng.random() < 0.5:
            _, parent_of, _, _ = random_tree(rng, size)
            edges = set(parent_of.items())
            ids   = [f"a{i:02d}" for i in range(size)]
            # perturb about half of the trees
            if rng.random() < 0.5:
                a, b = rng.choice(ids), rng.choice(ids)
                if (a, b) in edges and rng.random() < 0.5:
                    edges.discard((a, b))
                else:
                    edges.add((a, b))
        else:
            edges = {
                (rng.choice(ids), rng.choice(ids))
                for _ in range(rng.randint(0, 2 * size))
            } if size else set()
        return ids, sorted(edges)

    def test_matches_oracle(self):
        rng = random.Random(2)
        verdicts = set()
        for case in range(CASES):
            ids, edges = self.random_digraph(rng)
            kb = make_kb(edges, activities=ids)
            is_tree = not validate_tree(kb)
            verdicts.add(is_tree)
            with self.subTest(case=case, ids=len(ids), edges=edges):
                self.assertEqual(is_tree, self.oracle(ids, edges))
        self.assertEqual(verdicts, {True, False})


# ── Same-view closure ───────────────────────────────────────
class SameClosureOracleTest(SimpleTestCase):
    """Equivalence classes against connected components of the link graph."""

    def test_matches_components(self):
        rng = random.Random(3)
        for case in range(CASES):
            size  = rng.randint(1, 30)
            ids   = [f"v{i:02d}" for i in range(size)]
            # one record per unordered pair
            links = sorted({
                tuple(sorted((rng.choice(ids), rng.choice(ids)))) for _ in range(rng.randint(0, size))
            })
            kb    = make_world(activities=ids, same=links)

            neighbours = defaultdict(set)
            for a, b in links:
                neighbours[a].add(b)
                neighbours[b].add(a)
            components = set()
            seen = set()
            for start in ids:
                if start in seen:
                    continue
                component = {start}
                queue     = deque([start])
                while queue:
                    for other in neighbours[queue.popleft()]:
                        if other not in component:
                            component.add(other)
                            queue.append(other)
                seen |= component
                components.add(frozenset(component))

            with self.subTest(case=case):
                self.assertEqual(set(same_closure(kb).classes), components)


# ── Round trip ──────────────────────────────────────────────
ID_ALPHABET = 'abcXYZ019 _-."\\#=[]\t\né'


def random_id(rng):
    text = "".join(rng.choice(ID_ALPHABET) for _ in range(rng.randint(1, 8)))
    return text if text.strip() else text + "x"


def random_strength(rng):
    return rng.choice([0.0, 1.0, 0.5, rng.random(), rng.random()])


def random_knowledge_base(rng):
    """Any knowledge base the reader accepts: references resolve, strengths in [0, 1]."""
    activities = {random_id(rng) for _ in range(rng.randint(1, 6))}
    agents     = {random_id(rng) for _ in range(rng.randint(0, 3))}
    cues       = {random_id(rng) for _ in range(rng.randint(0, 3))}
    values     = {random_id(rng) for _ in range(rng.randint(0, 3))}
    a_list, g_list, v_list = sorted(activities), sorted(agents), sorted(values)
    cue_refs   = sorted(activities | agents | cues)

    def label(id_):
        return rng.choice(["", id_, random_id(rng)])

    def some(make, count):
        records = {}
        for _ in range(count):
            record = make()
            records[record.key] = record
        return list(records.values())

    return KnowledgeBase.build(
        activities=[
            Activity(a, label(a), rng.choice([None, *ActivityType.values])) for a in activities
        ],
        agents=[Agent(g, random_strength(rng)) for g in agents],
        context_cues=[ContextCue(c, rng.choice(CueKind.values)) for c in cues],
        values=[Value(v, label(v)) for v in values],
        implementations=some(lambda: Implementation(
            rng.choice(a_list), rng.choice(a_list), rng.choice(ImplementationType.values),
        ), rng.randint(0, 6)),
        beliefs=some(lambda: Belief(
            rng.choice(g_list), rng.choice(a_list), random_strength(rng), random_strength(rng),
        ), rng.randint(0, 5) if g_list else 0),
        habitual_triggers=some(lambda: HabitualTrigger(
            rng.choice(a_list), rng.choice(cue_refs), random_strength(rng),
        ), rng.randint(0, 4)),
        related_values=some(lambda: RelatedValue(
            rng.choice(a_list), rng.choice(v_list), random_strength(rng), rng.choice(Provenance.values),
        ), rng.randint(0, 5) if v_list else 0),
        adhered_values=some(lambda: AdheredValue(
            rng.choice(g_list), rng.choice(v_list), random_strength(rng),
        ), rng.randint(0, 3) if g_list and v_list else 0),
        same_links=some(lambda: SameLink(rng.choice(a_list), rng.choice(a_list)), rng.randint(0, 3)),
    )


class RoundTripTest(SimpleTestCase):
    """Serialization loses nothing."""

    def test_text_and_json(self):
        rng = random.Random(4)
        for case in range(CASES):
            kb = random_knowledge_base(rng)
            text = scenario.serialize(kb)
            with self.subTest(case=case, text=text):
                self.assertEqual(scenario.parse(text), kb)
                self.assertEqual(scenario.parse_json(scenario.serialize_json(kb)), kb)
                self.assertEqual(scenario.serialize(scenario.parse(text)), text)


# ── Decision scaling ────────────────────────────────────────
class ScalingInvarianceTest(SimpleTestCase):
    """
    Without habits, scaling every adhered-value strength by the same positive
    factor leaves the plan unchanged. Powers of two keep the arithmetic exact,
    so even ties survive the scaling.
    """

    def test_plan_unchanged(self):
        rng     = random.Random(5)
        context = PerformanceContext()
        config  = DecisionConfig(habit_threshold=0.5)
        for case in range(CASES):
            ids, parent_of, children, _ = random_tree(rng, rng.randint(1, 20))
            # partOf needs at least two parts
            part_of   = {p for p, kids in children.items() if len(kids) >= 2 and rng.random() < 0.3}
            value_ids = ["v0", "v1", "v2"]
            related   = {
                (a, v): rng.choice([0.0, 0.25, 0.5, 1.0, rng.random()])
                for a in ids for v in value_ids if rng.random() < 0.4
            }
            base  = {("Ann", v): rng.randint(0, 4) / 8 for v in value_ids}
            scale = rng.choice([0.125, 0.25, 0.5, 2.0])

            def plan(adherence):
                kb = make_world(
                    edges=list(parent_of.items()), activities=ids, part_of=part_of,
                    values=related, adherence=adherence,
                )
                return decide(kb, "Ann", context, config)

            original = plan(base)
            scaled   = plan({key: s * scale for key, s in base.items()})
            with self.subTest(case=case, scale=scale):
                self.assertEqual(scaled.leaf_actions, original.leaf_actions)
                self.assertEqual(
                    [(s.activity, s.pathway) for s in scaled.steps],
                    [(s.activity, s.pathway) for s in original.steps],
                )


# ── Decision against exhaustive search ──────────────────────
class ExhaustiveDecisionTest(SimpleTestCase):
    """
    On trees of at most six activities, with no habit firing, the plan is a
    completion of the tree with the highest summed leaf score.
    """

    def test_plan_is_a_best_completion(self):
        rng = random.Random(6)
        for case in range(CASES):
            ids, parent_of, children, _ = random_tree(rng, rng.randint(1, 6))
            part_of   = {p for p, kids in children.items() if len(kids) >= 2 and rng.random() < 0.4}
            value_ids = ["v0", "v1"]
            related   = {
                (a, v): rng.choice([0.0, 0.25, 0.5, 0.75, 1.0])
                for a in ids for v in value_ids if not children.get(a) and rng.random() < 0.6
            }
            adherence = {("Ann", v): rng.choice([0.0, 0.25, 0.5, 1.0]) for v in value_ids}
            kb = make_world(
                edges=list(parent_of.items()), activities=ids, part_of=part_of,
                values=related, adherence=adherence,
            )

            def completions(node):
                kids = sorted(children.get(node, ()))
                if not kids:
                    return [frozenset({node})]
                if node in part_of:
                    result = [frozenset()]
                    for kid in kids:
                        result = [done | more for done in result for more in completions(kid)]
                    return result
                return [c for kid in kids for c in completions(kid)]

            def total(leaves):
                return sum(
                    adherence[("Ann", v)] * related.get((leaf, v), 0.0)
                    for leaf in leaves for v in value_ids
                )

            options = {c: total(c) for c in completions(ids[0])}
            best    = max(options.values())
            winners = [c for c, score in options.items() if score == best]
            plan    = decide(kb, "Ann", PerformanceContext())

            with self.subTest(case=case, edges=parent_of, part_of=part_of):
                self.assertIn(plan.leaf_actions, options)
                self.assertEqual(options[plan.leaf_actions], best)
                self.assertEqual(plan.steps[0].score, best)
                if len(winners) == 1:
                    self.assertEqual(plan.leaf_actions, winners[0])


# ── Inheritance bounds ──────────────────────────────────────
class LeafBoundsTest(SimpleTestCase):
    """An inherited strength is an average, so it stays between its leaves."""

    def test_root_within_leaf_range(self):
        rng = random.Random(7)
        for case in range(CASES):
            ids, parent_of, children, part_of = random_tree(rng, rng.randint(1, 50))
            leaves  = [a for a in ids if not children.get(a)]
            related = {(a, "v0"): rng.random() for a in leaves if rng.random() < 0.7}
            kb      = make_world(edges=list(parent_of.items()), activities=ids, part_of=part_of, values=related)
            table   = infer_related_values(kb)

            # unasserted leaves count as 0
            leaf_strengths = [related.get((a, "v0"), 0.0) for a in leaves]
            with self.subTest(case=case):
                strength = table.strength(ids[0], "v0")
                self.assertGreaterEqual(strength, min(leaf_strengths) - 1e-12)
                self.assertLessEqual(strength, max(leaf_strengths) + 1e-12)

    def test_uniform_leaves(self):
        rng = random.Random(8)
        for case in range(CASES):
            ids, parent_of, children, part_of = random_tree(rng, rng.randint(1, 50))
            k       = rng.choice([0.0, 1.0, rng.random()])
            related = {(a, "v0"): k for a in ids if not children.get(a)}
            kb      = make_world(edges=list(parent_of.items()), activities=ids, part_of=part_of, values=related)
            table   = infer_related_values(kb)
            with self.subTest(case=case, k=k):
                for a in ids:
                    self.assertAlmostEqual(table.strength(a, "v0"), k, places=12)


# ── Monotone queries ────────────────────────────────────────
class MonotoneQueryTest(SimpleTestCase):
    """Raising theta never adds views; adding cues never lowers activation."""

    def test_views_shrink_as_theta_grows(self):
        rng        = random.Random(9)
        activities = [f"a{i}" for i in range(8)]
        for case in range(CASES):
            beliefs = [
                ("Ann", a, rng.random(), rng.random())
                for a in activities if rng.random() < 0.7
            ]
            kb = make_world(activities=activities, beliefs=beliefs)
            low, high = sorted((rng.random(), rng.choice([0.0, 1.0, rng.random()])))
            with self.subTest(case=case, low=low, high=high):
                self.assertLessEqual(shared_views(kb, "Ann", high), shared_views(kb, "Ann", low))
                self.assertLessEqual(personal_views(kb, "Ann", high), personal_views(kb, "Ann", low))

    def test_activation_grows_with_cues(self):
        rng  = random.Random(10)
        cues = [f"c{i}" for i in range(6)]
        for case in range(CASES):
            triggers = [("a", c, rng.random()) for c in cues if rng.random() < 0.6]
            kb       = make_world(activities=["a"], cues=cues, triggers=triggers)
            present  = [c for c in cues if rng.random() < 0.5]
            extra    = [c for c in cues if rng.random() < 0.5]
            smaller  = PerformanceContext(present)
            larger   = PerformanceContext(present + extra)
            with self.subTest(case=case, present=present, extra=extra):
                self.assertLessEqual(
                    habit_activation(kb, "a", smaller), habit_activation(kb, "a", larger),
                )
