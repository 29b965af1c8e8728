/**
 * Pluggable gloss encoders.
 *
 * Encoders are selected by name. Names of the form `hashed-ngram-<dim>`
 * resolve to a built-in deterministic character-trigram feature hasher that
 * needs no model downloads; any other name is treated as a transformers.js
 * feature-extraction model (e.g. `Xenova/all-MiniLM-L6-v2`) and loaded
 * lazily, so the package itself has no model dependency.
 */

export interface GlossEncoder {
  readonly name: string;
  /** Output dimension, when known before the first call. */
  readonly dimension: number | null;
  encode(texts: string[]): Promise<number[][]>;
}

const HASHED_PREFIX = 'hashed-ngram-';

/** FNV-1a 32-bit hash. */
function fnv1a(text: string, seed: number): number {
  let hash = (0x811c9dc5 ^ seed) >>> 0;
  for (let i = 0; i < text.length; i++) {
    hash ^= text.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193) >>> 0;
  }
  return hash >>> 0;
}

function l2normalize(vec: number[]): number[] {
  const norm = Math.sqrt(vec.reduce((s, v) => s + v * v, 0));
  return norm === 0 ? vec : vec.map((v) => v / norm);
}

function trigrams(text: string): string[] {
  const normalized = ` ${text.toLowerCase().replace(/\s+/g, ' ').trim()} `;
  if (normalized.trim().length === 0) return [];
  if (normalized.length <= 3) return [normalized];
  const grams: string[] = [];
  for (let i = 0; i + 3 <= normalized.length; i++) {
    grams.push(normalized.slice(i, i + 3));
  }
  return grams;
}

/**
 * Deterministic signed feature hashing of character trigrams. Identical
 * input text always yields the identical vector, across runs and machines.
 */
export class HashedNgramEncoder implements GlossEncoder {
  readonly name: string;
  readonly dimension: number;

  constructor(dimension: number) {
    if (!Number.isInteger(dimension) || dimension < 2) {
      throw new Error(`hashed-ngram dimension must be an integer >= 2, got ${dimension}`);
    }
    this.dimension = dimension;
    this.name = `${HASHED_PREFIX}${dimension}`;
  }

  async encode(texts: string[]): Promise<number[][]> {
    return texts.map((text) => {
      const vec = new Array<number>(this.dimension).fill(0);
      const grams = trigrams(text);
      for (const gram of grams) {
        const bucket = fnv1a(gram, 0) % this.dimension;
        const sign = (fnv1a(gram, 0x9e3779b9) & 1) === 0 ? 1 : -1;
        vec[bucket] += sign;
      }
      // Signed counts can in principle cancel; keep vectors nonzero so the
      // downstream loader's zero-norm check never trips.
      const squaredNorm = vec.reduce((s, v) => s + v * v, 0);
      if (squaredNorm === 0 && grams.length > 0) {
        vec[fnv1a(grams[0], 0) % this.dimension] = 1;
      }
      return l2normalize(vec);
    });
  }
}

interface FeatureExtractionPipeline {
  (texts: string[], options: { pooling: 'mean'; normalize: boolean }): Promise<{
    data: Float32Array | number[];
    dims: number[];
  }>;
}

/** A transformers.js feature-extraction model, loaded on first use. */
export class TransformersEncoder implements GlossEncoder {
  readonly name: string;
  readonly dimension: number | null = null;
  private pipe: FeatureExtractionPipeline | null = null;

  constructor(name: string) {
    this.name = name;
  }

  private async load(): Promise<FeatureExtractionPipeline> {
    if (this.pipe) return this.pipe;
    // Optional dependency: resolve by variable so builds never require it.
    let mod: any = null;
    for (const packageName of ['@huggingface/transformers', '@xenova/transformers']) {
      try {
        mod = await import(packageName);
        break;
      } catch {
        // try the next provider
      }
    }
    if (mod === null) {
      throw new Error(
        `encoder load failure: model ${this.name} needs the optional ` +
        `dependency @huggingface/transformers (or @xenova/transformers); ` +
        `install it or use a built-in ${HASHED_PREFIX}<dim> encoder`,
      );
    }
    try {
      this.pipe = (await mod.pipeline('feature-extraction', this.name)) as FeatureExtractionPipeline;
    } catch (err) {
      throw new Error(`encoder load failure: could not load ${this.name}: ${String(err)}`);
    }
    return this.pipe;
  }

  async encode(texts: string[]): Promise<number[][]> {
    const pipe = await this.load();
    const result = await pipe(texts, { pooling: 'mean', normalize: true });
    const dim = result.dims[result.dims.length - 1];
    const flat = Array.from(result.data as ArrayLike<number>);
    const rows: number[][] = [];
    for (let i = 0; i < texts.length; i++) {
      rows.push(flat.slice(i * dim, (i + 1) * dim));
    }
    return rows;
  }
}

export function resolveEncoder(modelName: string): GlossEncoder {
  if (modelName.startsWith(HASHED_PREFIX)) {
    const dim = Number(modelName.slice(HASHED_PREFIX.length));
    return new HashedNgramEncoder(dim);
  }
  return new TransformersEncoder(modelName);
}
