import type { Answer } from "./types";

// Fixed on-screen order and wording of the three answer buttons.
export const ANSWER_OPTIONS: ReadonlyArray<{ value: Answer; label: string }> = [
  { value: "left", label: "Left has lower stress" },
  { value: "same", label: "They look the same" },
  { value: "right", label: "Right has lower stress" },
];

export const CONFIDENCE_PROMPT = "How sure are you about that answer?";

export const CONFIDENCE_CHOICES: ReadonlyArray<{
  value: boolean;
  label: string;
}> = [
  { value: true, label: "Confident" },
  { value: false, label: "Not confident" },
];

export interface ExamplePair {
  title: string;
  note: string;
  lowerSvg: string;
  higherSvg: string;
}

const FRAME =
  `<svg viewBox="0 0 100 100" width="130" height="130" role="img" ` +
  `xmlns="http://www.w3.org/2000/svg">` +
  `<rect x="0" y="0" width="100" height="100" fill="#fff" stroke="#ccc"/>`;

function diagram(edges: string, nodes: string): string {
  return (
    FRAME +
    `<g stroke="#444" stroke-width="1.6" fill="none">${edges}</g>` +
    `<g fill="#1f6feb">${nodes}</g></svg>`
  );
}

function nodesAt(points: Array<[number, number]>): string {
  return points
    .map(([x, y]) => `<circle cx="${x}" cy="${y}" r="3.2"/>`)
    .join("");
}

function edgesAmong(
  points: Array<[number, number]>,
  pairs: Array<[number, number]>,
): string {
  return pairs
    .map(([a, b]) => {
      const [x1, y1] = points[a];
      const [x2, y2] = points[b];
      return `<line x1="${x1}" y1="${y1}" x2="${x2}" y2="${y2}"/>`;
    })
    .join("");
}

function pair(
  title: string,
  note: string,
  lower: Array<[number, number]>,
  higher: Array<[number, number]>,
  links: Array<[number, number]>,
): ExamplePair {
  return {
    title,
    note,
    lowerSvg: diagram(edgesAmong(lower, links), nodesAt(lower)),
    higherSvg: diagram(edgesAmong(higher, links), nodesAt(higher)),
  };
}

const RING_LINKS: Array<[number, number]> = [
  [0, 1],
  [1, 2],
  [2, 3],
  [3, 4],
  [4, 5],
  [5, 0],
];

const CHAIN_LINKS: Array<[number, number]> = [
  [0, 1],
  [1, 2],
  [2, 3],
  [3, 4],
];

const STAR_LINKS: Array<[number, number]> = [
  [0, 1],
  [0, 2],
  [0, 3],
  [0, 4],
  [0, 5],
];

const CLUSTER_LINKS: Array<[number, number]> = [
  [0, 1],
  [1, 2],
  [2, 0],
  [3, 4],
  [4, 5],
  [5, 3],
  [2, 3],
];

/**
 * Four side-by-side illustrations used in the instructions. Each shows the
 * same network twice: once drawn so that distance on the page agrees with
 * distance through the connections (lower stress), once so that it does
 * not (higher stress).
 */
export const EXAMPLE_PAIRS: ReadonlyArray<ExamplePair> = [
  pair(
    "A ring of six objects",
    "In the lower stress drawing, neighbours along the ring stay next to " +
      "each other and opposite objects stay far apart. In the higher " +
      "stress drawing the ring is folded over itself, so objects that are " +
      "three connections apart end up touching.",
    [
      [50, 10],
      [85, 30],
      [85, 70],
      [50, 90],
      [15, 70],
      [15, 30],
    ],
    [
      [20, 20],
      [80, 75],
      [25, 80],
      [75, 25],
      [50, 55],
      [45, 40],
    ],
    RING_LINKS,
  ),
  pair(
    "A chain of five objects",
    "A chain has low stress when it is laid out so that walking along the " +
      "connections moves you steadily across the page. Folding the chain " +
      "puts its two ends side by side even though they are four " +
      "connections apart.",
    [
      [10, 50],
      [30, 50],
      [50, 50],
      [70, 50],
      [90, 50],
    ],
    [
      [15, 35],
      [85, 60],
      [20, 75],
      [80, 20],
      [18, 50],
    ],
    CHAIN_LINKS,
  ),
  pair(
    "A hub with five spokes",
    "Every outer object is one connection from the hub and two from each " +
      "other. Stress is lower when they spread evenly around the hub, and " +
      "higher when the hub is shoved to one side with the outer objects " +
      "piled together.",
    [
      [50, 50],
      [50, 12],
      [86, 38],
      [72, 82],
      [28, 82],
      [14, 38],
    ],
    [
      [15, 85],
      [85, 15],
      [80, 35],
      [65, 20],
      [90, 50],
      [70, 55],
    ],
    STAR_LINKS,
  ),
  pair(
    "Two groups joined by one connection",
    "The network splits into two tightly connected groups with a single " +
      "link between them. Keeping the groups apart gives low stress; " +
      "shuffling their objects together gives high stress.",
    [
      [15, 30],
      [35, 15],
      [35, 45],
      [65, 55],
      [85, 40],
      [65, 85],
    ],
    [
      [20, 20],
      [75, 70],
      [30, 75],
      [70, 25],
      [25, 45],
      [80, 45],
    ],
    CLUSTER_LINKS,
  ),
];

export const LOWER_LABEL = "lower stress";
export const HIGHER_LABEL = "higher stress";

export const INSTRUCTIONS_TITLE = "Networks, drawings, and stress";

/**
 * Plain-language explanation shown before the first trial. Paragraphs are
 * rendered in order, followed by the example pairs above.
 */
export const INSTRUCTIONS_PARAGRAPHS: ReadonlyArray<string> = [
  "A network is a collection of objects together with connections " +
    "between some pairs of them. The objects could be people with " +
    "friendships, airports with direct flights, or computers with " +
    "cables. In the pictures that follow, each object is a dot and each " +
    "connection is a line between two dots.",
  "The same network can be drawn in many ways: the connections are " +
    "fixed, but the dots can be placed anywhere on the page. Some " +
    "placements reflect the structure of the network better than others.",
  "We measure how well a drawing reflects its network by its stress. " +
    "Think of each connection as a desire: objects with few connections " +
    "between them want to sit close together, and objects separated by " +
    "many connections want to sit far apart. A drawing has low stress " +
    "when the distances on the page agree with those desires, and high " +
    "stress when they disagree.",
  "Stress does not care about the overall size or orientation of a " +
    "drawing. Rotating a drawing, sliding it around, or zooming in or " +
    "out leaves its stress unchanged. Only the relative placement of " +
    "the dots matters.",
  "In each trial you will see two drawings of the same network, side " +
    "by side. Decide which drawing has lower stress, or whether the two " +
    "look the same, then say how sure you are. Some pairs are easy and " +
    "some are genuinely hard; answer with your best judgement and do " +
    "not worry about being fast.",
];
