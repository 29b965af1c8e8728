export { embedGlosses, readGlosses } from './embed.js';
export type { EmbedManifest, EmbedOptions, GlossRecord } from './embed.js';
export { HashedNgramEncoder, TransformersEncoder, resolveEncoder } from './encoders.js';
export type { GlossEncoder } from './encoders.js';
